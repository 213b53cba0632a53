#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsac/connection.hpp"
#include "nsac/curvature.hpp"
#include "nsac/matrix.hpp"
#include "nsac/random.hpp"

namespace nsac {

inline constexpr std::size_t kIdentityTerms = 17;
using IdentityVector = std::array<int, kIdentityTerms>;

// Kinds p, q, r, s in 1..3 of the difference a_{p|m q|n} - a_{r|n s|m}.
struct IdentityKey {
  int p = 1, q = 1, r = 1, s = 1;
  std::string tag() const {
    return "ric" + std::to_string(p) + std::to_string(q) + "-" + std::to_string(r) + std::to_string(s);
  }
  friend bool operator==(const IdentityKey&, const IdentityKey&) = default;
};

inline void check_key(const IdentityKey& k) {
  for (int x : {k.p, k.q, k.r, k.s})
    if (x < 1 || x > 3) throw std::invalid_argument("identity kinds must be in 1..3");
}

inline std::vector<IdentityKey> all_identity_keys() {
  std::vector<IdentityKey> keys;
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q)
      for (int r = 1; r <= 3; ++r)
        for (int s = 1; s <= 3; ++s) keys.push_back({p, q, r, s});
  return keys;
}

struct CatalogueEntry {
  IdentityKey key;
  IdentityVector printed;       // as published
  IdentityVector coefficients;  // verified values; differ from `printed` only for errata
  std::string id() const { return "eq:" + key.tag(); }
  bool has_erratum() const { return printed != coefficients; }
};

inline const std::vector<CatalogueEntry>& identity_catalogue() {
  static const std::vector<CatalogueEntry> cat = [] {
    struct Row {
      IdentityKey key;
      IdentityVector c;
    };
    const std::vector<Row> rows{
        {{1, 1, 1, 1}, {0, 0, -1, 0, 0, 1, -1, 1, -1, -1, 1, -1, 1, -1, -1, 0, 0}},
        {{1, 2, 1, 1}, {0, 1, 0, -1, 0, 1, -1, -1, -1, 0, 1, -1, 1, 1, 0, -1, -1}},
        {{1, 3, 1, 1}, {0, 1, 0, 0, 0, 1, -1, 1, -1, 0, 1, -1, 1, 1, 0, -1, 0}},
        {{2, 1, 1, 1}, {1, 0, -1, 0, -1, -1, -1, -1, -1, 0, -1, -1, 1, 1, 0, -1, -1}},
        {{2, 2, 1, 1}, {1, 1, 0, -1, -1, -1, -1, 1, -1, -1, -1, -1, 1, -1, -1, 0, 0}},
        {{2, 3, 1, 1}, {1, 1, 0, 0, -1, -1, -1, -1, -1, -1, -1, -1, 1, -1, -1, 0, -1}},
        {{3, 1, 1, 1}, {1, 0, -1, 0, 0, 1, -1, 1, -1, -1, -1, -1, 1, 1, 0, 0, -1}},
        {{3, 2, 1, 1}, {1, 1, 0, -1, 0, 1, -1, -1, -1, 0, -1, -1, 1, -1, -1, -1, 0}},
        {{3, 3, 1, 1}, {1, 1, 0, 0, 0, 1, -1, 1, -1, 0, -1, -1, 1, -1, -1, -1, -1}},
        {{1, 2, 1, 2}, {-1, 1, 1, -1, 1, 1, -1, -1, 1, 1, 1, -1, -1, 1, 1, 0, 0}},
        {{1, 3, 1, 2}, {-1, 0, 1, 1, 1, 1, -1, 1, 1, 1, 1, -1, -1, 1, 1, 0, 1}},
        {{1, 3, 1, 3}, {-1, 1, 1, 0, 0, 1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1}},
        {{2, 1, 2, 1}, {1, -1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1, 1, 1, 0, 0}},
        {{2, 2, 2, 2}, {0, 0, 1, 0, 0, -1, 1, 1, -1, -1, -1, 1, 1, -1, -1, 0, 0}},
        {{2, 3, 2, 3}, {0, 0, 1, 1, -1, -1, 1, -1, 1, -1, -1, 1, 1, -1, -1, 1, -1}},
        {{3, 1, 3, 1}, {1, -1, -1, 0, 0, 1, -1, 1, -1, -1, -1, 1, -1, 1, 1, 1, -1}},
        {{3, 3, 3, 3}, {0, 0, 1, 0, 0, 1, -1, 1, -1, 1, -1, 1, 1, -1, -1, 0, 0}},
    };
    std::vector<CatalogueEntry> out;
    for (const auto& r : rows) out.push_back({r.key, r.c, r.c});
    // The published row for (1,3,1,2) has the second and fourth coefficients
    // exchanged; the verified row solves the identity exactly.
    for (auto& e : out)
      if (e.key == IdentityKey{1, 3, 1, 2}) {
        e.coefficients[1] = 1;
        e.coefficients[3] = 0;
      }
    return out;
  }();
  return cat;
}

inline const CatalogueEntry* find_catalogue_entry(const IdentityKey& key) {
  for (const auto& e : identity_catalogue())
    if (e.key == key) return &e;
  return nullptr;
}

// The right-hand side is R-commutator + sum_k c_k * basis[k]; each basis tensor
// already carries its fixed factor and sign.
template <FieldScalar S>
struct IdentityTerms {
  Tensor<S> r_commutator;
  std::array<Tensor<S>, kIdentityTerms> basis;
};

namespace detail {

template <FieldScalar S>
using Index4Fn = std::function<void(Accumulator<S>&, std::size_t, std::size_t, std::size_t, std::size_t)>;

template <FieldScalar S>
Tensor<S> build4(std::size_t n, const Index4Fn<S>& f) {
  Tensor<S> out(n, {1, 3});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t q = 0; q < n; ++q) {
          Accumulator<S> acc(n);
          f(acc, i, j, m, q);
          out(i, j, m, q) = acc.finish();
        }
  return out;
}

// The five torsion-times-first-derivative shapes, for any (1,2) derivative D of a.
template <FieldScalar S>
std::array<Tensor<S>, 5> derivative_shapes(const Tensor<S>& T, const Tensor<S>& D) {
  const std::size_t n = T.dimension();
  std::array<Tensor<S>, 5> out;
  out[0] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(T(al, j, m), D(i, al, q));
  });
  out[1] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(T(al, j, q), D(i, al, m));
  });
  out[2] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(T(al, m, q), D(i, j, al));
  });
  out[3] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(T(i, al, q), D(al, j, m));
  });
  out[4] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(T(i, al, m), D(al, j, q));
  });
  return out;
}

// sum_a a^a_j R^i_{amn} - a^i_a R^a_{jmn}
template <FieldScalar S>
Tensor<S> r_commutator(const Tensor<S>& a, const Tensor<S>& R) {
  const std::size_t n = a.dimension();
  return build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) {
      acc.add_product(a(al, j), R(i, al, m, q));
      acc.add_product(a(i, al), R(al, j, m, q), Rational(-1));
    }
  });
}

}  // namespace detail

template <FieldScalar S>
IdentityTerms<S> identity_terms(const Tensor<S>& a, const Connection<S>& conn) {
  if (!(a.valence() == Valence{1, 1})) throw std::invalid_argument("identity needs a (1,1) field");
  const std::size_t n = a.dimension();
  const Tensor<S>& T = conn.tor_half();
  const Tensor<S> D = covariant_derivative(DerivKind::Sym, a, conn);
  const Tensor<S> DT = covariant_derivative(DerivKind::Sym, T, conn);
  const Rational one(1), neg(-1), two(2), ntwo(-2);
  IdentityTerms<S> t;
  t.r_commutator = detail::r_commutator(a, curvature_R(conn.sym()));

  auto shapes = detail::derivative_shapes(T, D);
  for (std::size_t k = 0; k < 5; ++k) t.basis[k] = shapes[k] * two;

  using detail::build4;
  t.basis[5] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(a(al, j), DT(i, al, m, q));
  });
  t.basis[6] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(a(al, j), DT(i, al, q, m));
  });
  t.basis[10] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(a(i, al), DT(al, j, m, q), neg);
  });
  t.basis[11] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
    for (std::size_t al = 0; al < n; ++al) acc.add_product(a(i, al), DT(al, j, q, m), neg);
  });
  auto quad = [&](std::size_t slot, const Rational& f, auto&& fn) {
    t.basis[slot] = build4<S>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
      for (std::size_t al = 0; al < n; ++al)
        for (std::size_t be = 0; be < n; ++be) fn(acc, f, i, j, m, q, al, be);
    });
  };
  quad(7, one, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(al, j), T(be, al, m) * T(i, be, q), f);
  });
  quad(8, one, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(al, j), T(be, al, q) * T(i, be, m), f);
  });
  quad(9, two, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(al, j), T(i, al, be) * T(be, m, q), f);
  });
  quad(12, neg, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(i, al), T(al, be, q) * T(be, j, m), f);
  });
  quad(13, neg, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(i, al), T(al, be, m) * T(be, j, q), f);
  });
  quad(14, ntwo, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(i, al), T(al, j, be) * T(be, m, q), f);
  });
  quad(15, ntwo, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(al, be), T(i, al, m) * T(be, j, q), f);
  });
  quad(16, ntwo, [&](auto& acc, auto& f, auto i, auto j, auto m, auto q, auto al, auto be) {
    acc.add_product(a(al, be), T(i, al, q) * T(be, j, m), f);
  });
  return t;
}

template <FieldScalar S, class C>
Tensor<S> evaluate_identity_rhs(const C& c, const IdentityTerms<S>& t) {
  Tensor<S> out = t.r_commutator;
  for (std::size_t k = 0; k < kIdentityTerms; ++k)
    if (c[k] != 0) out += t.basis[k] * Rational(c[k]);
  return out;
}

inline TensorField evaluate_identity_rhs(const IdentityVector& c, const TensorField& a,
                                         const ConnectionField& conn) {
  return evaluate_identity_rhs(c, identity_terms(a, conn));
}

inline DerivKind identity_kind(int k) { return kind_from_index(k); }

// a_{p|m q|n} - a_{r|n s|m}, indexed (i, j, m, n).
template <FieldScalar S>
Tensor<S> identity_lhs(const IdentityKey& key, const Tensor<S>& a, const Connection<S>& conn) {
  check_key(key);
  Tensor<S> x = double_covariant_derivative(identity_kind(key.p), identity_kind(key.q), a, conn);
  Tensor<S> y = double_covariant_derivative(identity_kind(key.r), identity_kind(key.s), a, conn);
  return x - swap_lower(y, 1, 2);
}

// Residual LHS - RHS for a catalogued combination (exactly zero when it holds).
inline TensorField verify_identity(const IdentityKey& key, const TensorField& a, const ConnectionField& conn) {
  const CatalogueEntry* e = find_catalogue_entry(key);
  if (!e) throw std::invalid_argument("combination " + key.tag() + " is not catalogued");
  return identity_lhs(key, a, conn) - evaluate_identity_rhs(e->coefficients, a, conn);
}

// Everything the coefficient solver needs from one random (a, L) instance.
struct IdentitySample {
  TensorField a;
  ConnectionField conn;
  std::array<TensorField, 9> second;  // a_{p|m q|n}, index (p-1)*3 + (q-1)
  IdentityTerms<Polynomial> terms;

  TensorField lhs(const IdentityKey& k) const {
    check_key(k);
    const auto& x = second[static_cast<std::size_t>((k.p - 1) * 3 + (k.q - 1))];
    const auto& y = second[static_cast<std::size_t>((k.r - 1) * 3 + (k.s - 1))];
    return x - swap_lower(y, 1, 2);
  }
};

inline IdentitySample make_identity_sample(TensorField a, ConnectionField conn) {
  IdentitySample s{std::move(a), std::move(conn), {}, {}};
  std::array<TensorField, 3> first;
  for (int p = 1; p <= 3; ++p)
    first[static_cast<std::size_t>(p - 1)] = covariant_derivative(identity_kind(p), s.a, s.conn);
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q)
      s.second[static_cast<std::size_t>((p - 1) * 3 + (q - 1))] =
          covariant_derivative(identity_kind(q), first[static_cast<std::size_t>(p - 1)], s.conn);
  s.terms = identity_terms(s.a, s.conn);
  return s;
}

struct RandomInstance {
  TensorField a;
  ConnectionField conn;
};

inline RandomInstance random_instance(std::uint64_t seed, std::size_t dim, unsigned degree = 2) {
  FieldGenerator g(seed, {dim, degree, 3});
  ConnectionField conn(g.tensor({1, 2}));
  TensorField a = g.tensor({1, 1});
  return {std::move(a), std::move(conn)};
}

inline IdentitySample random_identity_sample(std::uint64_t seed, std::size_t dim, unsigned degree = 2) {
  auto inst = random_instance(seed, dim, degree);
  return make_identity_sample(std::move(inst.a), std::move(inst.conn));
}

enum class SolveStatus { Solved, NotInFamily, Inconsistent, Underdetermined };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::NotInFamily: return "solution outside {-1,0,1}";
    case SolveStatus::Inconsistent: return "no exact solution";
    case SolveStatus::Underdetermined: return "basis terms not independent on the samples";
  }
  return "?";
}

struct SolveResult {
  IdentityKey key;
  SolveStatus status = SolveStatus::Underdetermined;
  std::array<Rational, kIdentityTerms> c{};
  std::string message;

  bool ok() const { return status == SolveStatus::Solved; }
  IdentityVector as_integers() const {
    IdentityVector v{};
    for (std::size_t k = 0; k < kIdentityTerms; ++k) v[k] = static_cast<int>(c[k].numerator().get_si());
    return v;
  }
};

// Exact least-structure solver for the 17 coefficients of any combination.
// Rows are polynomial coefficients of tensor entries across all samples; the
// basis columns are shared by every combination, so a square subsystem of 17
// independent rows is chosen once and each solve is then checked against the
// complete identity on every sample.
class IdentitySolver {
 public:
  explicit IdentitySolver(std::vector<IdentitySample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("solver needs at least one sample");
    IncrementalEchelon ech(kIdentityTerms);
    for (std::size_t s = 0; s < samples_.size() && ech.rank() < kIdentityTerms; ++s) {
      const auto& basis = samples_[s].terms.basis;
      for (std::size_t f = 0; f < basis[0].size() && ech.rank() < kIdentityTerms; ++f) {
        std::vector<Monomial> monos;
        for (const auto& b : basis)
          for (const auto& t : b[f].terms()) monos.push_back(t.mono);
        std::sort(monos.begin(), monos.end());
        monos.erase(std::unique(monos.begin(), monos.end()), monos.end());
        for (Monomial mo : monos) {
          std::vector<Rational> row(kIdentityTerms);
          for (std::size_t k = 0; k < kIdentityTerms; ++k) row[k] = basis[k][f].coefficient(mo);
          if (ech.insert(row)) {
            pivots_.push_back({s, f, mo});
            rows_.append_row(row);
            if (ech.rank() == kIdentityTerms) break;
          }
        }
      }
    }
    rank_ = ech.rank();
  }

  std::size_t design_rank() const { return rank_; }
  const std::vector<IdentitySample>& samples() const { return samples_; }

  SolveResult solve(const IdentityKey& key) const {
    check_key(key);
    SolveResult res;
    res.key = key;
    if (rank_ < kIdentityTerms) {
      res.status = SolveStatus::Underdetermined;
      res.message = "design rank " + std::to_string(rank_) + " < 17";
      return res;
    }
    std::vector<TensorField> target;
    for (const auto& s : samples_) target.push_back(s.lhs(key) - s.terms.r_commutator);
    std::vector<Rational> y;
    for (const auto& p : pivots_) y.push_back(target[p.sample][p.entry].coefficient(p.mono));
    auto sol = solve_square(rows_, y);
    if (!sol) throw std::logic_error("pivot subsystem unexpectedly singular");
    for (std::size_t k = 0; k < kIdentityTerms; ++k) res.c[k] = (*sol)[k];

    for (std::size_t s = 0; s < samples_.size(); ++s) {
      TensorField r = target[s];
      for (std::size_t k = 0; k < kIdentityTerms; ++k)
        if (!res.c[k].is_zero()) r -= samples_[s].terms.basis[k] * res.c[k];
      if (!r.is_zero()) {
        res.status = SolveStatus::Inconsistent;
        res.message = "residual nonzero on sample " + std::to_string(s);
        return res;
      }
    }
    for (const auto& v : res.c)
      if (!(v == Rational(0) || v == Rational(1) || v == Rational(-1))) {
        res.status = SolveStatus::NotInFamily;
        res.message = "coefficient " + v.to_string() + " outside {-1,0,1}";
        return res;
      }
    res.status = SolveStatus::Solved;
    return res;
  }

 private:
  struct Pivot {
    std::size_t sample;
    std::size_t entry;
    Monomial mono;
  };
  std::vector<IdentitySample> samples_;
  std::vector<Pivot> pivots_;
  RationalMatrix rows_;
  std::size_t rank_ = 0;
};

// Checks a coefficient vector for `key` on an independent sample.
inline bool identity_holds(const IdentityKey& key, const IdentityVector& c, const IdentitySample& s) {
  return (s.lhs(key) - evaluate_identity_rhs(c, s.terms)).is_zero();
}

inline std::size_t coefficient_span_rank(const std::vector<IdentityVector>& vecs) {
  if (vecs.empty()) return 0;
  RationalMatrix m;
  for (const auto& v : vecs) {
    std::vector<Rational> row;
    for (int x : v) row.emplace_back(x);
    m.append_row(row);
  }
  return matrix_rank(m);
}

// Rank of the catalogue's coefficient vectors.
inline std::size_t catalogue_independence_rank() {
  std::vector<IdentityVector> v;
  for (const auto& e : identity_catalogue()) v.push_back(e.coefficients);
  return coefficient_span_rank(v);
}

// Rank of the left-hand sides as formal differences x_{pq} - y_{rs} of the
// nine second derivatives and their m/n-swapped counterparts.
inline std::size_t lhs_formal_rank(const std::vector<IdentityKey>& keys) {
  if (keys.empty()) return 0;
  RationalMatrix m;
  for (const auto& k : keys) {
    check_key(k);
    std::vector<Rational> row(18);
    row[static_cast<std::size_t>((k.p - 1) * 3 + (k.q - 1))] += Rational(1);
    row[9 + static_cast<std::size_t>((k.r - 1) * 3 + (k.s - 1))] -= Rational(1);
    m.append_row(row);
  }
  return matrix_rank(m);
}

// Weights d^l_k (k = 1..5 rows, l = 1..3 columns) with every row summing to one.
class MixWeights {
 public:
  explicit MixWeights(std::array<std::array<Rational, 3>, 5> d) : d_(std::move(d)) {
    for (std::size_t k = 0; k < 5; ++k)
      if (d_[k][0] + d_[k][1] + d_[k][2] != Rational(1))
        throw std::invalid_argument("mix weight row " + std::to_string(k + 1) + " does not sum to 1");
  }
  static MixWeights pure(int kind) {
    std::array<std::array<Rational, 3>, 5> d{};
    for (auto& row : d) row[static_cast<std::size_t>(kind - 1)] = Rational(1);
    return MixWeights(d);
  }
  static MixWeights random(FieldGenerator& g) {
    std::array<std::array<Rational, 3>, 5> d{};
    for (auto& row : d) {
      row[0] = g.small_rational();
      row[1] = g.small_rational();
      row[2] = Rational(1) - row[0] - row[1];
    }
    return MixWeights(d);
  }
  const Rational& operator()(std::size_t k, std::size_t l) const { return d_[k][l]; }
  // Net torsion weight the mixture puts on upper and lower indices in row k.
  Rational upper(std::size_t k) const { return d_[k][0] - d_[k][1] + d_[k][2]; }
  Rational lower(std::size_t k) const { return -d_[k][0] + d_[k][1] + d_[k][2]; }

 private:
  std::array<std::array<Rational, 3>, 5> d_;
};

// Torsion-derivative shapes of the kind 1, 2, 3 first derivatives; the mixed
// family is linear in these, so they are computed once per field pair.
using MixedShapes = std::array<std::array<TensorField, 5>, 3>;

inline MixedShapes mixed_family_shapes(const TensorField& a, const ConnectionField& conn) {
  MixedShapes out;
  for (std::size_t l = 0; l < 3; ++l) {
    const TensorField D = covariant_derivative(identity_kind(static_cast<int>(l + 1)), a, conn);
    out[l] = detail::derivative_shapes(conn.tor_half(), D);
  }
  return out;
}

// Right side of the identity rewritten with d-weighted mixtures of the kind
// 1, 2, 3 derivatives. `as_printed` uses the published bracket corrections;
// otherwise the corrections follow from substituting each kind's derivative.
inline TensorField mixed_family_rhs(const IdentityVector& ci, const MixWeights& d,
                                    const IdentityTerms<Polynomial>& base, const MixedShapes& shapes,
                                    bool as_printed = false) {
  std::array<Rational, kIdentityTerms> c;
  for (std::size_t k = 0; k < kIdentityTerms; ++k) c[k] = Rational(ci[k]);

  TensorField out = base.r_commutator;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t k = 0; k < 5; ++k) out += shapes[l][k] * (Rational(2) * c[k] * d(k, l));
  // Untouched torsion-derivative terms.
  for (std::size_t k : {5u, 6u, 10u, 11u}) out += base.basis[k] * c[k];

  std::array<Rational, kIdentityTerms> e = c;
  if (as_printed) {
    const Rational c10_mix = d(2, 0) + d(2, 1) - d(2, 2);
    const Rational c15_mix = d(2, 0) - d(2, 1) - d(2, 2);
    e[7] = c[7] - c[3] * d.upper(3);
    e[8] = c[8] - c[4] * d.upper(4);
    e[9] = c[9] - c[2] * c10_mix / Rational(2);
    e[12] = c[12] + c[0] * d.lower(0);
    e[13] = c[13] + c[1] * d.lower(1);
    e[14] = c[14] - c[2] * c15_mix / Rational(2);
  } else {
    e[7] = c[7] - Rational(2) * c[3] * d.upper(3);
    e[8] = c[8] - Rational(2) * c[4] * d.upper(4);
    e[9] = c[9] - c[2] * d.upper(2);
    e[12] = c[12] + Rational(2) * c[0] * d.lower(0);
    e[13] = c[13] + Rational(2) * c[1] * d.lower(1);
    e[14] = c[14] + c[2] * d.lower(2);
  }
  e[15] = c[15] + c[1] * d.upper(1) + c[4] * d.lower(4);
  e[16] = c[16] + c[0] * d.upper(0) + c[3] * d.lower(3);
  for (std::size_t k : {7u, 8u, 9u, 12u, 13u, 14u, 15u, 16u}) out += base.basis[k] * e[k];
  return out;
}

inline TensorField mixed_family_rhs(const IdentityVector& ci, const MixWeights& d, const TensorField& a,
                                    const ConnectionField& conn, bool as_printed = false) {
  return mixed_family_rhs(ci, d, identity_terms(a, conn), mixed_family_shapes(a, conn), as_printed);
}

inline TensorField verify_mixed_family(const IdentityKey& key, const MixWeights& d, const TensorField& a,
                                       const ConnectionField& conn, bool as_printed = false) {
  const CatalogueEntry* e = find_catalogue_entry(key);
  if (!e) throw std::invalid_argument("combination " + key.tag() + " is not catalogued");
  return identity_lhs(key, a, conn) - mixed_family_rhs(e->coefficients, d, a, conn, as_printed);
}

// Right side written with partial derivatives only, the symmetric-part
// products made explicit, split per coefficient like identity_terms.
// `as_printed` reproduces the published weights and index placement;
// otherwise the weights follow from expanding each symmetric covariant
// derivative.
inline IdentityTerms<Polynomial> expanded_identity_terms(const TensorField& a, const ConnectionField& conn,
                                                         bool as_printed = false) {
  const std::size_t n = a.dimension();
  const TensorField& T = conn.tor_half();
  const TensorField& Sy = conn.sym();
  const TensorField da = gradient(a);
  const TensorField DT = covariant_derivative(DerivKind::Sym, T, conn);
  const Rational w = as_printed ? Rational(1) : Rational(2);  // weight on derivative-split terms
  const Rational one(1), neg(-1), two(2);

  IdentityTerms<Polynomial> out;
  out.r_commutator = detail::r_commutator(a, curvature_R(Sy));
  auto shapes = detail::derivative_shapes(T, da);
  for (auto& b : out.basis) b = TensorField(n, {1, 3});

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t q = 0; q < n; ++q) {
          std::vector<Accumulator<Polynomial>> acc(kIdentityTerms, Accumulator<Polynomial>(n));
          for (std::size_t k = 0; k < 5; ++k) acc[k].add(shapes[k](i, j, m, q), w);
          for (std::size_t al = 0; al < n; ++al) {
            acc[5].add_product(a(al, j), DT(i, al, m, q));
            acc[6].add_product(a(al, j), DT(i, al, q, m));
            acc[10].add_product(a(i, al), DT(al, j, m, q), neg);
            acc[11].add_product(a(i, al), DT(al, j, q, m), neg);
            for (std::size_t be = 0; be < n; ++be) {
              // a^a_j bracket
              acc[7].add_product(a(al, j), T(be, al, m) * T(i, be, q));
              acc[8].add_product(a(al, j), T(be, al, q) * T(i, be, m));
              acc[9].add_product(a(al, j), T(i, al, be) * T(be, m, q), two);
              acc[2].add_product(a(al, j), T(be, m, q) * Sy(i, al, be), w);
              acc[3].add_product(a(al, j), T(i, be, q) * Sy(be, al, m), w);
              acc[4].add_product(a(al, j), T(i, be, m) * Sy(be, al, q), w);
              // a^i_a bracket
              acc[12].add_product(a(i, al), T(al, be, q) * T(be, j, m), neg);
              acc[13].add_product(a(i, al), T(al, be, m) * T(be, j, q), neg);
              acc[14].add_product(a(i, al), T(al, j, be) * T(be, m, q), -w);
              acc[0].add_product(a(i, al), T(be, j, m) * Sy(al, be, q), -w);
              acc[1].add_product(a(i, al), T(be, j, q) * Sy(al, be, m), -w);
              acc[2].add_product(a(i, al), T(be, m, q) * Sy(al, j, be), -w);
              // a^a_b bracket
              acc[15].add_product(a(al, be), T(i, al, m) * T(be, j, q), -w);
              acc[16].add_product(a(al, be), T(i, al, q) * T(be, j, m), -w);
              acc[0].add_product(a(al, be), T(be, j, m) * Sy(i, al, q), w);
              acc[1].add_product(a(al, be), T(be, j, q) * Sy(i, al, m), w);
              if (as_printed) {
                // Published placement: torsion carries the summed lower index and
                // the symmetric factor the upper one.
                acc[3].add_product(a(al, be), T(i, be, q) * Sy(al, j, m), -w);
                acc[4].add_product(a(al, be), T(i, be, m) * Sy(al, j, q), -w);
              } else {
                acc[3].add_product(a(al, be), T(i, al, q) * Sy(be, j, m), -w);
                acc[4].add_product(a(al, be), T(i, al, m) * Sy(be, j, q), -w);
              }
            }
          }
          for (std::size_t k = 0; k < kIdentityTerms; ++k) out.basis[k](i, j, m, q) = acc[k].finish();
        }
  return out;
}

inline TensorField expanded_identity_rhs(const IdentityVector& ci, const TensorField& a,
                                         const ConnectionField& conn, bool as_printed = false) {
  return evaluate_identity_rhs(ci, expanded_identity_terms(a, conn, as_printed));
}

inline TensorField verify_expanded_identity(const IdentityKey& key, const TensorField& a,
                                            const ConnectionField& conn, bool as_printed = false) {
  const CatalogueEntry* e = find_catalogue_entry(key);
  if (!e) throw std::invalid_argument("combination " + key.tag() + " is not catalogued");
  return evaluate_identity_rhs(e->coefficients, a, conn) -
         expanded_identity_rhs(e->coefficients, a, conn, as_printed);
}

// Residuals of the two split expansions of L^a_{mn} a^i_{j p|a} for p = 1, 2.
inline std::array<TensorField, 2> connection_expansion_residuals(const TensorField& a,
                                                                 const ConnectionField& conn) {
  using detail::build4;
  const std::size_t n = a.dimension();
  const TensorField& L = conn.full();
  const TensorField& T = conn.tor_half();
  const TensorField& Sy = conn.sym();
  const TensorField da = gradient(a);
  std::array<TensorField, 2> out;
  for (int p = 1; p <= 2; ++p) {
    const TensorField D = covariant_derivative(identity_kind(p), a, conn);
    const bool first = p == 1;
    TensorField lhs = build4<Polynomial>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
      for (std::size_t al = 0; al < n; ++al) acc.add_product(L(al, m, q), D(i, j, al));
    });
    TensorField rhs = build4<Polynomial>(n, [&](auto& acc, auto i, auto j, auto m, auto q) {
      for (std::size_t al = 0; al < n; ++al) {
        for (const TensorField* X : {&T, &Sy}) {
          const Polynomial& x = (*X)(al, m, q);
          acc.add_product(x, da(i, j, al));
          for (std::size_t be = 0; be < n; ++be) {
            const Polynomial& s_up = first ? Sy(i, be, al) : Sy(i, al, be);
            const Polynomial& s_lo = first ? Sy(be, j, al) : Sy(be, al, j);
            const Polynomial& t_up = first ? T(i, be, al) : T(i, al, be);
            const Polynomial& t_lo = first ? T(be, j, al) : T(be, al, j);
            acc.add_product(x, s_up * a(be, j));
            acc.add_product(x, s_lo * a(i, be), Rational(-1));
            acc.add_product(x, t_up * a(be, j));
            acc.add_product(x, t_lo * a(i, be), Rational(-1));
          }
        }
      }
    });
    out[static_cast<std::size_t>(p - 1)] = lhs - rhs;
  }
  return out;
}

}  // namespace nsac
