#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nsac/connection.hpp"
#include "nsac/matrix.hpp"

namespace nsac {

// R^i_{jmn} = L^i_{jm,n} - L^i_{jn,m} + L^a_{jm} L^i_{an} - L^a_{jn} L^i_{am}
// for a symmetric connection.
template <FieldScalar S>
Tensor<S> curvature_R(const Tensor<S>& sym) {
  if (!(sym.valence() == Valence{1, 2})) throw std::invalid_argument("curvature needs a (1,2) input");
  const std::size_t n = sym.dimension();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (!(sym(i, j, k) == sym(i, k, j)))
          throw std::invalid_argument("curvature_R requires a symmetric connection");
  const Tensor<S> d = gradient(sym);
  Tensor<S> R(n, {1, 3});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t q = 0; q < n; ++q) {
          Accumulator<S> acc(n);
          acc.add(d(i, j, m, q));
          acc.add(d(i, j, q, m), Rational(-1));
          for (std::size_t a = 0; a < n; ++a) {
            acc.add_product(sym(a, j, m), sym(i, a, q));
            acc.add_product(sym(a, j, q), sym(i, a, m), Rational(-1));
          }
          R(i, j, m, q) = acc.finish();
        }
  return R;
}

// The six tensors spanning the curvature family, all indexed (i, j, m, n).
template <FieldScalar S>
struct RhoBasis {
  Tensor<S> R;         // curvature of the symmetric part
  Tensor<S> dtor_mn;   // tor^i_{jm|n}
  Tensor<S> dtor_nm;   // tor^i_{jn|m}
  Tensor<S> tt_v;      // tor^a_{jm} tor^i_{an}
  Tensor<S> tt_vp;     // tor^a_{jn} tor^i_{am}
  Tensor<S> tt_w;      // tor^a_{mn} tor^i_{ja}
};

template <FieldScalar S>
RhoBasis<S> rho_basis(const Connection<S>& conn) {
  const std::size_t n = conn.dimension();
  const Tensor<S>& T = conn.tor_half();
  RhoBasis<S> b;
  b.R = curvature_R(conn.sym());
  b.dtor_mn = covariant_derivative(DerivKind::Sym, T, conn);
  b.dtor_nm = swap_lower(b.dtor_mn, 1, 2);
  b.tt_v = Tensor<S>(n, {1, 3});
  b.tt_vp = Tensor<S>(n, {1, 3});
  b.tt_w = Tensor<S>(n, {1, 3});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t q = 0; q < n; ++q) {
          Accumulator<S> v(n), vp(n), w(n);
          for (std::size_t a = 0; a < n; ++a) {
            v.add_product(T(a, j, m), T(i, a, q));
            vp.add_product(T(a, j, q), T(i, a, m));
            w.add_product(T(a, m, q), T(i, j, a));
          }
          b.tt_v(i, j, m, q) = v.finish();
          b.tt_vp(i, j, m, q) = vp.finish();
          b.tt_w(i, j, m, q) = w.finish();
        }
  return b;
}

struct RhoCoefficients {
  Rational u, u_prime, v, v_prime, w;
  friend bool operator==(const RhoCoefficients&, const RhoCoefficients&) = default;
};

template <FieldScalar S>
Tensor<S> rho(const RhoCoefficients& c, const RhoBasis<S>& b) {
  return b.R + b.dtor_mn * c.u + b.dtor_nm * c.u_prime + b.tt_v * c.v + b.tt_vp * c.v_prime +
         b.tt_w * c.w;
}

template <FieldScalar S>
Tensor<S> rho(const RhoCoefficients& c, const Connection<S>& conn) {
  return rho(c, rho_basis(conn));
}

struct RhoEntry {
  std::string id;
  RhoCoefficients c;
};

// The fourteen members listed for the linearly independent identities.
inline const std::vector<RhoEntry>& rho_catalogue() {
  static const std::vector<RhoEntry> cat{
      {"eq:rho1", {1, -1, 1, -1, -2}},   {"eq:rho2", {1, -1, -1, -1, 0}},
      {"eq:rho3", {1, -1, 1, -1, 0}},    {"eq:rho4", {-1, -1, -1, -1, 0}},
      {"eq:rho5", {-1, -1, 1, -1, -2}},  {"eq:rho6", {-1, -1, -1, -1, -2}},
      {"eq:rho7", {1, -1, -1, 1, 2}},    {"eq:rho8", {1, -1, 1, 1, 2}},
      {"eq:rho9", {1, -1, 1, -1, 2}},    {"eq:rho10", {-1, 1, -1, 1, 2}},
      {"eq:rho11", {-1, 1, 1, -1, -2}},  {"eq:rho12", {-1, 1, -1, 1, -2}},
      {"eq:rho13", {1, -1, 1, 1, 0}},    {"eq:rho14", {-1, -1, 1, 1, 0}},
  };
  return cat;
}

// A family member: 0 is the bare curvature R, 1..14 index the catalogue.
using RhoMember = int;

inline RhoCoefficients rho_member_coefficients(RhoMember m) {
  if (m == 0) return {0, 0, 0, 0, 0};
  if (m < 1 || m > 14) throw std::out_of_range("curvature family member must be 0..14");
  return rho_catalogue()[static_cast<std::size_t>(m - 1)].c;
}

// The three six-member subsets stated to be independent.
inline const std::vector<std::vector<RhoMember>>& independent_rho_sets() {
  static const std::vector<std::vector<RhoMember>> sets{
      {1, 2, 3, 4, 7, 10}, {0, 2, 3, 4, 7, 10}, {1, 2, 3, 4, 7, 0}};
  return sets;
}

// Rank of the coefficient rows (1, u, u', v, v', w).
inline std::size_t rho_family_rank(const std::vector<RhoMember>& members) {
  if (members.empty()) throw std::invalid_argument("empty curvature family subset");
  RationalMatrix m;
  for (RhoMember k : members) {
    RhoCoefficients c = rho_member_coefficients(k);
    m.append_row({Rational(1), c.u, c.u_prime, c.v, c.v_prime, c.w});
  }
  return matrix_rank(m);
}

// Rank of the members as sampled tensors: each (member, connection) pair gives
// one row of polynomial coefficients. Bounded above by the coefficient rank.
inline std::size_t sampled_rho_rank(const std::vector<RhoMember>& members,
                                    const std::vector<ConnectionField>& samples) {
  std::vector<RhoBasis<Polynomial>> bases;
  for (const auto& c : samples) bases.push_back(rho_basis(c));
  // Columns are indexed by (sample, entry, monomial) and rows by member.
  std::vector<std::vector<Rational>> rows(members.size());
  for (const auto& b : bases) {
    std::vector<TensorField> t;
    for (RhoMember k : members) t.push_back(rho(rho_member_coefficients(k), b));
    for (std::size_t f = 0; f < t[0].size(); ++f) {
      std::vector<Monomial> monos;
      for (const auto& x : t)
        for (const auto& term : x[f].terms()) monos.push_back(term.mono);
      std::sort(monos.begin(), monos.end());
      monos.erase(std::unique(monos.begin(), monos.end()), monos.end());
      for (Monomial mo : monos)
        for (std::size_t r = 0; r < t.size(); ++r) rows[r].push_back(t[r][f].coefficient(mo));
    }
  }
  RationalMatrix m;
  for (auto& r : rows) m.append_row(r);
  return matrix_rank(m);
}

// Objects built from the torsion and a (1,1) field that appear when the
// identity family is expanded in partial derivatives. Each carries the form
// written with raw connection coefficients and the form split into symmetric
// and torsion parts. `split_as_printed` keeps the published split where it
// differs from the algebraically derived one.
struct BracketObject {
  std::string id;
  TensorField raw;
  TensorField split;
  TensorField split_as_printed;
};

inline std::vector<BracketObject> bracket_objects(const TensorField& a, const ConnectionField& conn) {
  if (!(a.valence() == Valence{1, 1})) throw std::invalid_argument("bracket objects need a (1,1) field");
  const std::size_t n = a.dimension();
  const TensorField& L = conn.full();
  const TensorField& Sy = conn.sym();
  const TensorField& T = conn.tor_half();
  const TensorField da = gradient(a);
  const Rational one(1), neg(-1), half(1, 2);

  using Fn = std::function<void(Accumulator<Polynomial>&, std::size_t, std::size_t, std::size_t, std::size_t)>;
  auto build = [&](const Fn& f) {
    TensorField out(n, {1, 3});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t m = 0; m < n; ++m)
          for (std::size_t q = 0; q < n; ++q) {
            Accumulator<Polynomial> acc(n);
            f(acc, i, j, m, q);
            out(i, j, m, q) = acc.finish();
          }
    return out;
  };
  // Sum over a, b of X(i, a, b) * Y(a, b) * a^a_b with caller-chosen factors.
  auto ab_sum = [&](Accumulator<Polynomial>& acc, const Rational& s,
                    const std::function<Polynomial(std::size_t, std::size_t)>& xy) {
    for (std::size_t al = 0; al < n; ++al)
      for (std::size_t be = 0; be < n; ++be) acc.add_product(xy(al, be), a(al, be), s);
  };
  auto tor_raw = [&](std::size_t i, std::size_t x, std::size_t y) {
    return (L(i, x, y) - L(i, y, x)) * half;
  };

  std::vector<BracketObject> out;

  {
    auto raw = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      for (std::size_t al = 0; al < n; ++al) {
        acc.add_product(tor_raw(i, al, m), da(al, j, q));
        acc.add_product(tor_raw(al, j, m), da(i, al, q), neg);
      }
    });
    auto split = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      for (std::size_t al = 0; al < n; ++al) {
        acc.add_product(T(i, al, m), da(al, j, q));
        acc.add_product(T(al, j, m), da(i, al, q), neg);
      }
    });
    out.push_back({"eq:<>1", raw, split, split});
  }
  {
    auto raw = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, one, [&](auto al, auto be) { return L(i, m, al) * L(be, j, q) - L(i, al, m) * L(be, q, j); });
    });
    auto printed = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, one, [&](auto al, auto be) { return Sy(i, al, m) * T(be, j, q) - T(i, al, m) * Sy(be, j, q); });
    });
    out.push_back({"eq:<>2", raw, printed * Rational(2), printed});
  }
  {
    auto raw = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, one, [&](auto al, auto be) { return L(i, m, al) * L(be, q, j) - L(i, al, m) * L(be, j, q); });
    });
    auto printed = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, neg, [&](auto al, auto be) { return Sy(i, al, m) * T(be, j, q) + T(i, al, m) * Sy(be, j, q); });
    });
    out.push_back({"eq:<>3", raw, printed * Rational(2), printed});
  }
  {
    auto raw = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, one, [&](auto al, auto be) { return tor_raw(i, m, al) * L(be, j, q) - L(i, al, q) * tor_raw(be, m, j); });
    });
    auto split = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, neg, [&](auto al, auto be) { return T(i, al, m) * T(be, j, q) - T(i, al, q) * T(be, j, m); });
      ab_sum(acc, neg, [&](auto al, auto be) { return T(i, al, m) * Sy(be, j, q) - Sy(i, al, q) * T(be, j, m); });
    });
    out.push_back({"eq:<>4", raw, split, split});
  }
  {
    auto raw = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, one, [&](auto al, auto be) { return L(i, m, al) * tor_raw(be, j, q) - tor_raw(i, al, q) * L(be, m, j); });
    });
    auto split = build([&](auto& acc, auto i, auto j, auto m, auto q) {
      ab_sum(acc, neg, [&](auto al, auto be) { return T(i, al, m) * T(be, j, q) - T(i, al, q) * T(be, j, m); });
      ab_sum(acc, one, [&](auto al, auto be) { return Sy(i, al, m) * T(be, j, q) - T(i, al, q) * Sy(be, j, m); });
    });
    out.push_back({"eq:<>5", raw, split, split});
  }
  return out;
}

}  // namespace nsac
