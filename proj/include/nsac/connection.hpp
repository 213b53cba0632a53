#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsac/matrix.hpp"
#include "nsac/tensor.hpp"

namespace nsac {

// Affine connection coefficients L^i_{jk} with the split L = sym + tor_half,
// where tor_half^i_{jk} = (L^i_{jk} - L^i_{kj}) / 2.
template <FieldScalar S>
class Connection {
 public:
  Connection() = default;
  explicit Connection(Tensor<S> coeffs) : full_(std::move(coeffs)) {
    if (!(full_.valence() == Valence{1, 2}))
      throw std::invalid_argument("connection coefficients must have valence (1,2)");
    const std::size_t n = full_.dimension();
    sym_ = Tensor<S>(n, {1, 2});
    tor_ = Tensor<S>(n, {1, 2});
    const Rational half(1, 2);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          sym_(i, j, k) = (full_(i, j, k) + full_(i, k, j)) * half;
          tor_(i, j, k) = (full_(i, j, k) - full_(i, k, j)) * half;
        }
  }

  std::size_t dimension() const { return full_.dimension(); }
  const Tensor<S>& full() const { return full_; }
  const Tensor<S>& sym() const { return sym_; }
  const Tensor<S>& tor_half() const { return tor_; }
  bool is_symmetric() const { return tor_.is_zero(); }

 private:
  Tensor<S> full_, sym_, tor_;
};

using ConnectionField = Connection<Polynomial>;

template <FieldScalar S>
struct Decomposition {
  Tensor<S> sym;
  Tensor<S> tor_half;
};

template <FieldScalar S>
Decomposition<S> decompose(const Tensor<S>& coeffs) {
  Connection<S> c(coeffs);
  return {c.sym(), c.tor_half()};
}

enum class DerivKind { Sym, K1, K2, K3, K4 };

inline constexpr std::array<DerivKind, 5> kAllKinds{DerivKind::Sym, DerivKind::K1, DerivKind::K2,
                                                     DerivKind::K3, DerivKind::K4};

// Net torsion weight on upper and lower indices. The upper index receives
// sym + upper*tor_half, each lower index receives -(sym - lower*tor_half).
struct Signature {
  int upper;
  int lower;
};

inline Signature signature(DerivKind k) {
  switch (k) {
    case DerivKind::Sym: return {0, 0};
    case DerivKind::K1: return {1, -1};
    case DerivKind::K2: return {-1, 1};
    case DerivKind::K3: return {1, 1};
    case DerivKind::K4: return {-1, -1};
  }
  throw std::invalid_argument("unknown derivative kind");
}

inline std::string to_string(DerivKind k) {
  switch (k) {
    case DerivKind::Sym: return "sym";
    case DerivKind::K1: return "1";
    case DerivKind::K2: return "2";
    case DerivKind::K3: return "3";
    case DerivKind::K4: return "4";
  }
  return "?";
}

inline DerivKind kind_from_index(int k) {
  switch (k) {
    case 0: return DerivKind::Sym;
    case 1: return DerivKind::K1;
    case 2: return DerivKind::K2;
    case 3: return DerivKind::K3;
    case 4: return DerivKind::K4;
  }
  throw std::invalid_argument("derivative kind index must be 0..4");
}

// Covariant derivative when the partial derivatives of `a` are already known;
// this lets pointwise callers supply evaluated jets.
template <FieldScalar S>
Tensor<S> covariant_derivative_from_gradient(DerivKind kind, const Tensor<S>& a,
                                             const Tensor<S>& grad_a, const Connection<S>& conn) {
  const std::size_t n = a.dimension();
  if (conn.dimension() != n) throw std::invalid_argument("connection dimension mismatch");
  const Valence va = a.valence();
  const Valence vo{va.upper, va.lower + 1};
  if (!(grad_a.valence() == vo)) throw std::invalid_argument("gradient has wrong valence");

  const Signature sg = signature(kind);
  const Tensor<S> up = conn.sym() + conn.tor_half() * Rational(sg.upper);
  const Tensor<S> lo = conn.sym() - conn.tor_half() * Rational(sg.lower);

  Tensor<S> out(n, vo);
  std::vector<std::size_t> src(va.rank());
  for (std::size_t f = 0; f < out.size(); ++f) {
    const auto idx = out.indices(f);
    const std::size_t k = idx.back();
    Accumulator<S> acc(n);
    acc.add(grad_a[f]);
    for (std::size_t p = 0; p < va.rank(); ++p) {
      std::copy(idx.begin(), idx.end() - 1, src.begin());
      const bool is_upper = p < va.upper;
      for (std::size_t al = 0; al < n; ++al) {
        src[p] = al;
        if (is_upper)
          acc.add_product(up(idx[p], al, k), a.at(src));
        else
          acc.add_product(lo(al, idx[p], k), a.at(src), Rational(-1));
      }
    }
    out[f] = acc.finish();
  }
  return out;
}

template <FieldScalar S>
Tensor<S> covariant_derivative(DerivKind kind, const Tensor<S>& a, const Connection<S>& conn) {
  return covariant_derivative_from_gradient(kind, a, gradient(a), conn);
}

// a_{p|m q|n}: the q-derivative of the p-derivative, result indices (i, j, m, n).
template <FieldScalar S>
Tensor<S> double_covariant_derivative(DerivKind p, DerivKind q, const Tensor<S>& a,
                                      const Connection<S>& conn) {
  return covariant_derivative(q, covariant_derivative(p, a, conn), conn);
}

// Expanded second derivative of a (1,1) field for kinds 1..3, written out term by
// term. Each lower-index pair below names which two indices L carries and in
// which order; letters are i, j, m, n and a/b for the two summation indices.
namespace detail {

struct ExpandedPattern {
  DerivKind p, q;
  std::array<const char*, 19> pairs;
};

// Order of slots: five first-derivative terms, L^i_{am,n}, the two factors of
// the quadratic a^a_j terms (two products), L^a_{jm,n}, the two a^i_a products,
// then the two a^a_b products.
inline const std::array<ExpandedPattern, 9>& expanded_patterns() {
  using K = DerivKind;
  static const std::array<ExpandedPattern, 9> table{{
      {K::K1, K::K1, {"jn", "jm", "mn", "an", "am", "am", "am", "bn", "ab", "mn", "jm", "bm", "jn", "jb", "mn", "am", "jn", "an", "jm"}},
      {K::K1, K::K2, {"nj", "jm", "nm", "na", "am", "am", "am", "nb", "ab", "nm", "jm", "bm", "nj", "jb", "nm", "am", "nj", "na", "jm"}},
      {K::K1, K::K3, {"nj", "jm", "nm", "an", "am", "am", "am", "bn", "ab", "nm", "jm", "bm", "nj", "jb", "nm", "am", "nj", "an", "jm"}},
      {K::K2, K::K1, {"jn", "mj", "mn", "an", "ma", "ma", "ma", "bn", "ba", "mn", "mj", "mb", "jn", "bj", "mn", "ma", "jn", "an", "mj"}},
      {K::K2, K::K2, {"nj", "mj", "nm", "na", "ma", "ma", "ma", "nb", "ba", "nm", "mj", "mb", "nj", "bj", "nm", "ma", "nj", "na", "mj"}},
      {K::K2, K::K3, {"nj", "mj", "nm", "an", "ma", "ma", "ma", "bn", "ba", "nm", "mj", "mb", "nj", "bj", "nm", "ma", "nj", "an", "mj"}},
      {K::K3, K::K1, {"jn", "mj", "mn", "an", "am", "am", "am", "bn", "ab", "mn", "mj", "mb", "jn", "bj", "mn", "am", "jn", "an", "mj"}},
      {K::K3, K::K2, {"nj", "mj", "nm", "na", "am", "am", "am", "nb", "ab", "nm", "mj", "mb", "nj", "bj", "nm", "am", "nj", "na", "mj"}},
      {K::K3, K::K3, {"nj", "mj", "nm", "an", "am", "am", "am", "bn", "ab", "nm", "mj", "mb", "nj", "bj", "nm", "am", "nj", "an", "mj"}},
  }};
  return table;
}

}  // namespace detail

template <FieldScalar S>
Tensor<S> double_covariant_derivative_expanded(DerivKind p, DerivKind q, const Tensor<S>& a,
                                               const Connection<S>& conn) {
  if (!(a.valence() == Valence{1, 1}))
    throw std::invalid_argument("expanded second derivative needs a (1,1) field");
  const auto& table = detail::expanded_patterns();
  auto it = std::find_if(table.begin(), table.end(),
                         [&](const detail::ExpandedPattern& e) { return e.p == p && e.q == q; });
  if (it == table.end()) throw std::invalid_argument("expanded form exists for kinds 1..3 only");
  const auto& pat = it->pairs;

  const std::size_t n = a.dimension();
  const Tensor<S>& L = conn.full();
  const Tensor<S> da = gradient(a);    // a^i_{j,m}
  const Tensor<S> dda = gradient(da);  // a^i_{j,m,n}
  const Tensor<S> dL = gradient(L);    // L^i_{jk,l}

  Tensor<S> out(n, {1, 3});
  std::size_t v[6];  // i j m n a b
  auto pick = [&](const char* pr, std::size_t slot) {
    const char c = pr[slot];
    switch (c) {
      case 'i': return v[0];
      case 'j': return v[1];
      case 'm': return v[2];
      case 'n': return v[3];
      case 'a': return v[4];
      case 'b': return v[5];
    }
    throw std::logic_error("bad index letter");
  };
  auto l2 = [&](std::size_t up, const char* pr) -> const S& { return L(up, pick(pr, 0), pick(pr, 1)); };
  auto dl2 = [&](std::size_t up, const char* pr) -> const S& {
    return dL(up, pick(pr, 0), pick(pr, 1), v[3]);
  };

  // The a^a_b products are summed over b before multiplying by the factor
  // that only carries a; that needs the table's letter layout checked once.
  auto has = [](const char* pr, char c) { return pr[0] == c || pr[1] == c; };
  if (has(pat[15], 'b') || has(pat[17], 'b') || has(pat[16], 'a') || has(pat[18], 'a'))
    throw std::logic_error("unexpected index layout in expanded pattern");

  const Rational one(1), neg(-1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t nn = 0; nn < n; ++nn) {
          v[0] = i, v[1] = j, v[2] = m, v[3] = nn;
          Accumulator<S> acc(n);
          acc.add(dda(i, j, m, nn));
          for (std::size_t al = 0; al < n; ++al) {
            v[4] = al;
            acc.add_product(l2(al, pat[0]), da(i, al, m), neg);
            acc.add_product(l2(al, pat[1]), da(i, al, nn), neg);
            acc.add_product(l2(al, pat[2]), da(i, j, al), neg);
            acc.add_product(l2(i, pat[3]), da(al, j, m), one);
            acc.add_product(l2(i, pat[4]), da(al, j, nn), one);
            acc.add_product(a(al, j), dl2(i, pat[5]), one);
            acc.add_product(a(i, al), dl2(al, pat[10]), neg);
            Accumulator<S> up(n), low(n), mixed15(n), mixed17(n);
            for (std::size_t be = 0; be < n; ++be) {
              v[5] = be;
              up.add_product(l2(be, pat[6]), l2(i, pat[7]), one);
              up.add_product(l2(i, pat[8]), l2(be, pat[9]), neg);
              low.add_product(l2(al, pat[11]), l2(be, pat[12]), one);
              low.add_product(l2(al, pat[13]), l2(be, pat[14]), one);
              mixed15.add_product(a(al, be), l2(be, pat[16]), one);
              mixed17.add_product(a(al, be), l2(be, pat[18]), one);
            }
            acc.add_product(a(al, j), up.finish(), one);
            acc.add_product(a(i, al), low.finish(), one);
            acc.add_product(l2(i, pat[15]), mixed15.finish(), neg);
            acc.add_product(l2(i, pat[17]), mixed17.finish(), neg);
          }
          out(i, j, m, nn) = acc.finish();
        }
  return out;
}

// The ten linear relations among the five derivative kinds. Each is stored as
// weights on (sym, 1, 2, 3, 4) whose weighted sum of derivatives must vanish.
struct DerivativeRelation {
  std::string id;
  std::array<Rational, 5> weights;
};

inline const std::vector<DerivativeRelation>& derivative_relations() {
  const Rational h(1, 2);
  static const std::vector<DerivativeRelation> rel{
      {"eq:0|=1|+2|", {1, -h, -h, 0, 0}},    {"eq:0|=3|+4|", {1, 0, 0, -h, -h}},
      {"eq:1|=0|+2|", {-2, 1, 1, 0, 0}},     {"eq:1|=2|+3|+4|", {0, 1, 1, -1, -1}},
      {"eq:2|=0|+1|", {-2, 1, 1, 0, 0}},     {"eq:2|=1|+3|+4|", {0, 1, 1, -1, -1}},
      {"eq:3|=0|+4|", {-2, 0, 0, 1, 1}},     {"eq:3|=1|+2|+4|", {0, -1, -1, 1, 1}},
      {"eq:4|=0|+3|", {-2, 0, 0, 1, 1}},     {"eq:4|=1|+2|+3|", {0, -1, -1, 1, 1}},
  };
  return rel;
}

struct RelationResidual {
  std::string id;
  Tensor<Polynomial> residual;
};

inline std::vector<RelationResidual> verify_derivative_relations(const ConnectionField& conn,
                                                                 const TensorField& a) {
  std::array<TensorField, 5> d;
  for (std::size_t k = 0; k < 5; ++k) d[k] = covariant_derivative(kAllKinds[k], a, conn);
  std::vector<RelationResidual> out;
  for (const auto& r : derivative_relations()) {
    TensorField res = d[0] * r.weights[0];
    for (std::size_t k = 1; k < 5; ++k) res += d[k] * r.weights[k];
    out.push_back({r.id, std::move(res)});
  }
  return out;
}

struct KindTriple {
  std::string name;
  std::vector<DerivKind> kinds;
};

// The eight triples of independent kinds, b1..b8.
inline const std::vector<KindTriple>& independent_kind_triples() {
  using K = DerivKind;
  static const std::vector<KindTriple> t{
      {"b1", {K::K1, K::K2, K::K3}},  {"b2", {K::K1, K::K2, K::K4}},  {"b3", {K::K1, K::K3, K::K4}},
      {"b4", {K::K2, K::K3, K::K4}},  {"b5", {K::Sym, K::K1, K::K3}}, {"b6", {K::Sym, K::K1, K::K4}},
      {"b7", {K::Sym, K::K2, K::K3}}, {"b8", {K::Sym, K::K2, K::K4}},
  };
  return t;
}

// The two remaining triples, each spanning only a plane.
inline const std::vector<KindTriple>& dependent_kind_triples() {
  using K = DerivKind;
  static const std::vector<KindTriple> t{
      {"sym-1-2", {K::Sym, K::K1, K::K2}},
      {"sym-3-4", {K::Sym, K::K3, K::K4}},
  };
  return t;
}

// Rank of the coefficient rows (1, upper, lower) of a set of distinct kinds.
inline std::size_t derivative_kind_rank(const std::vector<DerivKind>& kinds) {
  if (kinds.empty()) throw std::invalid_argument("empty derivative kind set");
  std::set<DerivKind> seen(kinds.begin(), kinds.end());
  if (seen.size() != kinds.size()) throw std::invalid_argument("duplicate derivative kind");
  RationalMatrix m;
  for (DerivKind k : kinds) {
    Signature s = signature(k);
    m.append_row({Rational(1), Rational(s.upper), Rational(s.lower)});
  }
  return matrix_rank(m);
}

}  // namespace nsac
