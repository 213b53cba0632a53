#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

#include "nsac/nsac.hpp"
#include "oracles/oracles.hpp"

using namespace nsac;

namespace {

struct Fields {
  TensorField a;
  ConnectionField conn;
};

Fields random_fields(std::uint64_t seed, std::size_t dim, unsigned degree) {
  auto inst = random_instance(seed, dim, degree);
  return {inst.a, inst.conn};
}

}  // namespace

TEST(Connection, SplitsIntoSymmetricAndTorsionHalves) {
  auto f = random_fields(1, 3, 2);
  const auto& L = f.conn.full();
  EXPECT_EQ(f.conn.sym() + f.conn.tor_half(), L);
  EXPECT_EQ(f.conn.sym(), swap_lower(f.conn.sym(), 0, 1));
  EXPECT_EQ(f.conn.tor_half(), swap_lower(f.conn.tor_half(), 0, 1) * Rational(-1));
  EXPECT_FALSE(f.conn.is_symmetric());
  EXPECT_TRUE(ConnectionField(f.conn.sym()).is_symmetric());
  EXPECT_THROW(ConnectionField(TensorField(3, {1, 1})), std::invalid_argument);
}

class KindVsOracle : public ::testing::TestWithParam<std::tuple<int, std::size_t>> {};

TEST_P(KindVsOracle, MixedFieldDerivativeMatchesDefiningRule) {
  auto [kind, dim] = GetParam();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto f = random_fields(100 + seed, dim, 2);
    EXPECT_EQ(covariant_derivative(kind_from_index(kind), f.a, f.conn),
              oracle::derivative_11(kind, f.a, f.conn.full()))
        << "kind " << kind << " dim " << dim << " seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, KindVsOracle,
                         ::testing::Combine(::testing::Range(0, 5), ::testing::Values(std::size_t{2}, std::size_t{3})));

TEST(Derivatives, AllKindsAgreeForSymmetricConnection) {
  auto f = random_fields(7, 3, 2);
  ConnectionField sym(f.conn.sym());
  TensorField base = covariant_derivative(DerivKind::Sym, f.a, sym);
  for (DerivKind k : kAllKinds) EXPECT_EQ(covariant_derivative(k, f.a, sym), base) << to_string(k);
}

TEST(Derivatives, KindsDifferUnderTorsion) {
  auto f = random_fields(8, 3, 2);
  for (std::size_t x = 0; x < 5; ++x)
    for (std::size_t y = x + 1; y < 5; ++y)
      EXPECT_NE(covariant_derivative(kAllKinds[x], f.a, f.conn), covariant_derivative(kAllKinds[y], f.a, f.conn))
          << x << " vs " << y;
}

TEST(Derivatives, ProductRuleHoldsForEveryKind) {
  FieldGenerator g(9, {3, 2, 2});
  TensorField v = g.tensor({1, 0}), w = g.tensor({0, 1});
  ConnectionField conn(g.tensor({1, 2}));
  for (DerivKind k : kAllKinds) {
    TensorField dv = covariant_derivative(k, v, conn), dw = covariant_derivative(k, w, conn);
    TensorField lhs = covariant_derivative(k, outer(v, w), conn);
    // outer(dv, w) has indices (i, k, j); move the derivative index last.
    TensorField rhs = swap_lower(outer(dv, w), 0, 1) + outer(v, dw);
    EXPECT_EQ(lhs, rhs) << to_string(k);
  }
}

class RelationDimension : public ::testing::TestWithParam<std::size_t> {};

TEST_P(RelationDimension, TenRelationsVanishExactly) {
  const std::size_t dim = GetParam();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto f = random_fields(200 + seed, dim, dim == 4 ? 1 : 2);
    auto res = verify_derivative_relations(f.conn, f.a);
    ASSERT_EQ(res.size(), 10u);
    for (const auto& r : res) EXPECT_TRUE(r.residual.is_zero()) << r.id << " dim " << dim;
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, RelationDimension, ::testing::Values(2, 3, 4));

TEST(Derivatives, RelationWeightsAnnihilateEverySignatureRow) {
  // Each relation holds for all fields iff its weights kill (1, upper, lower).
  for (const auto& r : derivative_relations()) {
    Rational s0, su, sl;
    for (int k = 0; k < 5; ++k) {
      Signature sg = signature(kind_from_index(k));
      s0 += r.weights[k];
      su += r.weights[k] * Rational(sg.upper);
      sl += r.weights[k] * Rational(sg.lower);
    }
    EXPECT_TRUE(s0.is_zero() && su.is_zero() && sl.is_zero()) << r.id;
  }
}

TEST(Derivatives, PerturbedRelationFails) {
  auto f = random_fields(5, 3, 2);
  TensorField d0 = covariant_derivative(DerivKind::Sym, f.a, f.conn);
  TensorField d1 = covariant_derivative(DerivKind::K1, f.a, f.conn);
  TensorField d2 = covariant_derivative(DerivKind::K2, f.a, f.conn);
  EXPECT_TRUE((d0 - (d1 + d2) * Rational(1, 2)).is_zero());
  EXPECT_FALSE((d0 - d1 * Rational(2, 3) - d2 * Rational(1, 3)).is_zero());
}

TEST(KindRanks, EightTriplesIndependentTwoDependent) {
  ASSERT_EQ(independent_kind_triples().size(), 8u);
  for (const auto& t : independent_kind_triples()) EXPECT_EQ(derivative_kind_rank(t.kinds), 3u) << t.name;
  for (const auto& t : dependent_kind_triples()) EXPECT_EQ(derivative_kind_rank(t.kinds), 2u) << t.name;
  EXPECT_EQ(derivative_kind_rank({kAllKinds.begin(), kAllKinds.end()}), 3u);
  EXPECT_THROW(derivative_kind_rank({}), std::invalid_argument);
  EXPECT_THROW(derivative_kind_rank({DerivKind::K1, DerivKind::K1}), std::invalid_argument);
}

TEST(KindRanks, TriplesCoverAllTenChoices) {
  // Every 3-subset of the five kinds appears exactly once across both lists.
  std::set<std::set<DerivKind>> seen;
  for (const auto* list : {&independent_kind_triples(), &dependent_kind_triples()})
    for (const auto& t : *list) seen.insert({t.kinds.begin(), t.kinds.end()});
  EXPECT_EQ(seen.size(), 10u);
}

TEST(DoubleDerivative, ExpandedFormMatchesComposition) {
  auto f = random_fields(31, 3, 2);
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q) {
      DerivKind kp = kind_from_index(p), kq = kind_from_index(q);
      EXPECT_EQ(double_covariant_derivative_expanded(kp, kq, f.a, f.conn),
                double_covariant_derivative(kp, kq, f.a, f.conn))
          << p << q;
    }
  EXPECT_THROW(double_covariant_derivative_expanded(DerivKind::Sym, DerivKind::K1, f.a, f.conn),
               std::invalid_argument);
  EXPECT_THROW(double_covariant_derivative_expanded(DerivKind::K1, DerivKind::K1, TensorField(3, {1, 0}), f.conn),
               std::invalid_argument);
}

TEST(DoubleDerivative, CompositionMatchesOracleTwice) {
  auto f = random_fields(32, 2, 2);
  TensorField first = oracle::derivative_11(1, f.a, f.conn.full());
  // Second derivative of a (1,2) field: extend the oracle rule by hand.
  const auto& L = f.conn.full();
  const std::size_t n = 2;
  TensorField second(n, {1, 3});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t q = 0; q < n; ++q) {
          Polynomial v = partial(first(i, j, m), q);
          for (std::size_t al = 0; al < n; ++al)
            v = v + L(i, al, q) * first(al, j, m) - L(al, j, q) * first(i, al, m) - L(al, m, q) * first(i, j, al);
          second(i, j, m, q) = v;
        }
  EXPECT_EQ(double_covariant_derivative(DerivKind::K1, DerivKind::K1, f.a, f.conn), second);
}

TEST(Derivatives, DimensionMismatchThrows) {
  auto f = random_fields(1, 3, 1);
  auto g = random_fields(1, 2, 1);
  EXPECT_THROW(covariant_derivative(DerivKind::K1, g.a, f.conn), std::invalid_argument);
  EXPECT_THROW(kind_from_index(5), std::invalid_argument);
}
