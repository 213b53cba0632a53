#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsac/connection.hpp"
#include "nsac/curvature.hpp"
#include "nsac/tensor.hpp"
#include "nsac/univariate.hpp"

namespace nsac {

namespace detail {

template <class S>
concept DivisionScalar = FieldScalar<S> && requires(const S& a, const S& b) {
  { a / b } -> std::convertible_to<S>;
};

// Gauss-Jordan inverse of an n x n matrix over a field; throws if singular.
template <DivisionScalar S>
std::vector<std::vector<S>> invert(std::vector<std::vector<S>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<S>> inv(n, std::vector<S>(n, scalar_traits<S>::zero(n)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = scalar_traits<S>::constant(n, Rational(1));
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && is_zero(m[piv][col])) ++piv;
    if (piv == n) throw std::domain_error("symmetric part of the metric is singular");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    const S p = m[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      m[col][c] = m[col][c] / p;
      inv[col][c] = inv[col][c] / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || is_zero(m[r][col])) continue;
      const S f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        m[r][c] = m[r][c] - f * m[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

}  // namespace detail

template <FieldScalar S>
Tensor<S> symmetric_part(const Tensor<S>& g) {
  Tensor<S> out(g.dimension(), {0, 2});
  const Rational half(1, 2);
  for (std::size_t i = 0; i < g.dimension(); ++i)
    for (std::size_t j = 0; j < g.dimension(); ++j) out(i, j) = (g(i, j) + g(j, i)) * half;
  return out;
}

template <FieldScalar S>
Tensor<S> antisymmetric_part(const Tensor<S>& g) {
  Tensor<S> out(g.dimension(), {0, 2});
  const Rational half(1, 2);
  for (std::size_t i = 0; i < g.dimension(); ++i)
    for (std::size_t j = 0; j < g.dimension(); ++j) out(i, j) = (g(i, j) - g(j, i)) * half;
  return out;
}

// A non-symmetric metric together with its first derivatives and the inverse of
// its symmetric part. Over rational functions of t everything is exact; general
// polynomial metrics are handled at a chosen rational point.
template <FieldScalar S>
struct GeneralizedMetric {
  Tensor<S> g;        // g_{ij}
  Tensor<S> dg;       // g_{ij,k}
  Tensor<S> sym_inv;  // inverse of g_{(ij)}, upper indices

  std::size_t dimension() const { return g.dimension(); }

  static GeneralizedMetric from_parts(Tensor<S> g, Tensor<S> dg)
    requires detail::DivisionScalar<S>
  {
    if (!(g.valence() == Valence{0, 2}) || !(dg.valence() == Valence{0, 3}))
      throw std::invalid_argument("metric must have valence (0,2) and its gradient (0,3)");
    const std::size_t n = g.dimension();
    auto sym = symmetric_part(g);
    std::vector<std::vector<S>> m(n, std::vector<S>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m[i][j] = sym(i, j);
    auto inv = detail::invert(std::move(m));
    Tensor<S> up(n, {2, 0});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) up(i, j) = inv[i][j];
    return {std::move(g), std::move(dg), std::move(up)};
  }

  // Exact metric whose entries are functions with symbolic derivatives.
  static GeneralizedMetric from_field(Tensor<S> g)
    requires detail::DivisionScalar<S>
  {
    auto dg = gradient(g);
    return from_parts(std::move(g), std::move(dg));
  }
};

// A polynomial metric frozen at a rational point, derivatives included.
inline GeneralizedMetric<Rational> metric_at_point(const TensorField& g, std::span<const Rational> point) {
  return GeneralizedMetric<Rational>::from_parts(evaluate(g, point), evaluate(gradient(g), point));
}

// Gamma^i_{jk} = 1/2 g^{i a}(g_{j a,k} - g_{jk,a} + g_{a k,j}) with the full metric
// inside the bracket and the inverse symmetric part outside.
template <FieldScalar S>
Connection<S> christoffel_generalized(const GeneralizedMetric<S>& m) {
  const std::size_t n = m.dimension();
  Tensor<S> lowered(n, {0, 3});  // (a, j, k)
  const Rational half(1, 2);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        lowered(a, j, k) = (m.dg(j, a, k) - m.dg(j, k, a) + m.dg(a, k, j)) * half;
  Tensor<S> gamma(n, {1, 2});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Accumulator<S> acc(n);
        for (std::size_t a = 0; a < n; ++a) acc.add_product(m.sym_inv(i, a), lowered(a, j, k));
        gamma(i, j, k) = acc.finish();
      }
  return Connection<S>(std::move(gamma));
}

// Gamma_{a.jk} built from the antisymmetric part of the metric only, stored as (a, j, k).
template <FieldScalar S>
Tensor<S> christoffel_first_kind_antisym(const GeneralizedMetric<S>& m) {
  const std::size_t n = m.dimension();
  const Rational half(1, 2);
  auto dv = [&](std::size_t i, std::size_t j, std::size_t k) { return (m.dg(i, j, k) - m.dg(j, i, k)) * half; };
  Tensor<S> out(n, {0, 3});
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) out(a, j, k) = (dv(j, a, k) - dv(j, k, a) + dv(a, k, j)) * half;
  return out;
}

// g_{ij,k} - L^a_{ik} g_{aj} - L^a_{kj} g_{ia}, stored as (i, j, k).
template <FieldScalar S>
Tensor<S> einstein_metricity_residual(const GeneralizedMetric<S>& m, const Connection<S>& conn) {
  const std::size_t n = m.dimension();
  if (conn.full().dimension() != n) throw std::invalid_argument("metric and connection dimensions differ");
  const auto& L = conn.full();
  Tensor<S> out(n, {0, 3});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        Accumulator<S> acc(n);
        acc.add(m.dg(i, j, k));
        for (std::size_t a = 0; a < n; ++a) {
          acc.add_product(L(a, i, k), m.g(a, j), Rational(-1));
          acc.add_product(L(a, k, j), m.g(i, a), Rational(-1));
        }
        out(i, j, k) = acc.finish();
      }
  return out;
}

// The four-dimensional cosmological metric with coordinate 0 playing the role of t:
// diag(s1, s2, s3, s4) plus +n at (1,2) and -n at (2,1).
struct CosmologyMetric {
  std::array<UPoly, 4> s;
  UPoly n;
  Rational vprime_minus_w{1};

  void validate() const {
    UPoly prod = UPoly::constant(Rational(1));
    for (const auto& si : s) prod = prod * si;
    if (prod.is_zero()) throw std::invalid_argument("s1*s2*s3*s4 vanishes identically");
  }

  // Throws unless every s_i is nonzero at t.
  void check_nonvanishing(const Rational& t) const {
    for (std::size_t i = 0; i < 4; ++i)
      if (s[i].evaluate(t).is_zero())
        throw std::domain_error("s" + std::to_string(i + 1) + " vanishes at t = " + t.to_string());
  }

  Tensor<TimeFunction> metric() const {
    validate();
    Tensor<TimeFunction> g(4, {0, 2});
    for (std::size_t i = 0; i < 4; ++i) g(i, i) = TimeFunction(s[i]);
    g(1, 2) = TimeFunction(n);
    g(2, 1) = TimeFunction(-n);
    return g;
  }

  GeneralizedMetric<TimeFunction> generalized() const { return GeneralizedMetric<TimeFunction>::from_field(metric()); }
};

// The published pattern of the antisymmetric first-kind symbols for this
// metric: +-1/2 n' on the permutations of coordinates 0, 1, 2, zero elsewhere.
inline Tensor<TimeFunction> antisym_christoffel_reference(const CosmologyMetric& cm) {
  const TimeFunction half_dn = TimeFunction(cm.n.derivative()) * Rational(1, 2);
  Tensor<TimeFunction> out(4, {0, 3});
  out(0, 1, 2) = -half_dn;
  out(0, 2, 1) = half_dn;
  out(1, 0, 2) = half_dn;
  out(1, 2, 0) = -half_dn;
  out(2, 0, 1) = -half_dn;
  out(2, 1, 0) = half_dn;
  return out;
}

struct ScalarCurvatureFamily {
  TimeFunction scalar_R;     // g^{ab} R^c_{abc} of the symmetric part
  TimeFunction contraction;  // b^{ab} b^{ce} b^{dz} Gamma_{a.cd} Gamma_{b.ez}
  TimeFunction value;        // scalar_R + (v'-w) * contraction
};

namespace detail {

// Full contraction of two antisymmetric first-kind symbols with three inverse metrics.
inline TimeFunction torsion_contraction(const Tensor<TimeFunction>& gam, const Tensor<TimeFunction>& inv) {
  const std::size_t n = gam.dimension();
  // Raise the two trailing indices first: Y_a^{ez} = b^{ce} b^{dz} Gamma_{a.cd}.
  Tensor<TimeFunction> half_raised(n, {1, 2});  // (z, a, c): b^{dz} Gamma_{a.cd}
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = 0; c < n; ++c) {
        TimeFunction sum;
        for (std::size_t d = 0; d < n; ++d)
          if (!inv(d, z).is_zero() && !gam(a, c, d).is_zero()) sum = sum + inv(d, z) * gam(a, c, d);
        half_raised(z, a, c) = sum;
      }
  Tensor<TimeFunction> raised(n, {2, 1});  // (e, z, a)
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t z = 0; z < n; ++z)
      for (std::size_t a = 0; a < n; ++a) {
        TimeFunction sum;
        for (std::size_t c = 0; c < n; ++c)
          if (!inv(c, e).is_zero() && !half_raised(z, a, c).is_zero()) sum = sum + inv(c, e) * half_raised(z, a, c);
        raised(e, z, a) = sum;
      }
  TimeFunction total;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (inv(a, b).is_zero()) continue;
      for (std::size_t e = 0; e < n; ++e)
        for (std::size_t z = 0; z < n; ++z)
          if (!raised(e, z, a).is_zero() && !gam(b, e, z).is_zero())
            total = total + inv(a, b) * raised(e, z, a) * gam(b, e, z);
    }
  return total;
}

}  // namespace detail

inline TimeFunction scalar_curvature(const GeneralizedMetric<TimeFunction>& m) {
  auto conn = christoffel_generalized(m);
  auto R = curvature_R(conn.sym());
  auto ricci = contract(R, 0, 2);  // R^c_{abc}
  TimeFunction total;
  for (std::size_t a = 0; a < m.dimension(); ++a)
    for (std::size_t b = 0; b < m.dimension(); ++b)
      if (!m.sym_inv(a, b).is_zero()) total = total + m.sym_inv(a, b) * ricci(a, b);
  return total;
}

inline ScalarCurvatureFamily scalar_curvature_family(const CosmologyMetric& cm) {
  auto m = cm.generalized();
  ScalarCurvatureFamily out;
  out.scalar_R = scalar_curvature(m);
  out.contraction = detail::torsion_contraction(christoffel_first_kind_antisym(m), m.sym_inv);
  out.value = out.scalar_R + out.contraction * cm.vprime_minus_w;
  return out;
}

// Matter Lagrangian as the torsion part of the scalar-curvature family.
inline TimeFunction matter_lagrangian_contraction(const CosmologyMetric& cm) {
  auto m = cm.generalized();
  return detail::torsion_contraction(christoffel_first_kind_antisym(m), m.sym_inv) * cm.vprime_minus_w;
}

// 3(v'-w)/2 * n'^2 / (s1 s2 s3).
inline TimeFunction matter_lagrangian_closed_form(const CosmologyMetric& cm) {
  cm.validate();
  UPoly dn = cm.n.derivative();
  TimeFunction num(dn * dn * (cm.vprime_minus_w * Rational(3, 2)));
  return num / TimeFunction(cm.s[0] * cm.s[1] * cm.s[2]);
}

// T_ij = -2 dL/db^{ij} + b_{(ij)} L, where L is read as a cubic form in the
// independent inverse-metric components and differentiated algebraically.
inline Tensor<TimeFunction> energy_momentum(const CosmologyMetric& cm) {
  auto m = cm.generalized();
  const std::size_t n = 4;
  auto gam = christoffel_first_kind_antisym(m);
  const auto& b = m.sym_inv;
  auto sym = symmetric_part(m.g);
  TimeFunction lagrangian = detail::torsion_contraction(gam, b) * cm.vprime_minus_w;

  // D_ij: derivative of the cubic with respect to each of its three b factors.
  Tensor<TimeFunction> d(n, {0, 2});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      TimeFunction sum;
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v) {
              const auto& bxy = b(x, y);
              const auto& buv = b(u, v);
              if (bxy.is_zero() || buv.is_zero()) continue;
              // slot 1: b^{ij} b^{xy} b^{uv} Gamma_{i.xu} Gamma_{j.yv}
              if (!gam(i, x, u).is_zero() && !gam(j, y, v).is_zero())
                sum = sum + bxy * buv * gam(i, x, u) * gam(j, y, v);
              // slot 2: b^{xy} b^{ij} b^{uv} Gamma_{x.iu} Gamma_{y.jv}
              if (!gam(x, i, u).is_zero() && !gam(y, j, v).is_zero())
                sum = sum + bxy * buv * gam(x, i, u) * gam(y, j, v);
              // slot 3: b^{xy} b^{uv} b^{ij} Gamma_{x.ui} Gamma_{y.vj}
              if (!gam(x, u, i).is_zero() && !gam(y, v, j).is_zero())
                sum = sum + bxy * buv * gam(x, u, i) * gam(y, v, j);
            }
      d(i, j) = sum * cm.vprime_minus_w;
    }
  Tensor<TimeFunction> t(n, {0, 2});
  const Rational half(1, 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t(i, j) = (d(i, j) + d(j, i)) * half * Rational(-2) + sym(i, j) * lagrangian;
  return t;
}

struct RecoveredN {
  std::vector<double> t;
  std::vector<double> n1;  // + branch, zero at t0
  std::vector<double> n2;  // - branch
};

// Cumulative composite Simpson quadrature of
//   +-(2/(3(v'-w))) * integral sqrt(L_M s1 s2 s3) dt
// on `steps` panels over [t0, t1]. The radicand is evaluated exactly.
inline RecoveredN recover_n(const CosmologyMetric& cm, const Rational& t0, const Rational& t1, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("recover_n needs at least one panel");
  if (cm.vprime_minus_w.sign() <= 0) throw std::domain_error("recover_n requires v'-w > 0");
  TimeFunction radicand = matter_lagrangian_contraction(cm) * TimeFunction(cm.s[0] * cm.s[1] * cm.s[2]);
  const double factor = 2.0 / (3.0 * cm.vprime_minus_w.to_double());
  const Rational width = (t1 - t0) / Rational(static_cast<long>(steps));
  auto integrand = [&](const Rational& t) {
    Rational r = radicand.evaluate(t);
    if (r.sign() < 0) throw std::domain_error("negative radicand at t = " + t.to_string());
    return std::sqrt(r.to_double());
  };
  RecoveredN out;
  out.t.reserve(steps + 1);
  double acc = 0;
  Rational left = t0;
  double f_left = integrand(left);
  out.t.push_back(t0.to_double());
  out.n1.push_back(0.0);
  const double h = width.to_double();
  for (std::size_t k = 1; k <= steps; ++k) {
    Rational right = t0 + width * Rational(static_cast<long>(k));
    Rational mid = (left + right) * Rational(1, 2);
    double f_right = integrand(right);
    acc += h / 6.0 * (f_left + 4.0 * integrand(mid) + f_right);
    out.t.push_back(right.to_double());
    out.n1.push_back(factor * acc);
    left = right;
    f_left = f_right;
  }
  out.n2.reserve(out.n1.size());
  for (double v : out.n1) out.n2.push_back(-v);
  return out;
}

}  // namespace nsac
