#include <gtest/gtest.h>

#include <stdexcept>

#include "nsac/nsac.hpp"
#include "oracles/oracles.hpp"

using namespace nsac;

namespace {

RhoCoefficients from_array(const std::array<int, 5>& c) { return {c[0], c[1], c[2], c[3], c[4]}; }

std::vector<ConnectionField> connections(std::uint64_t seed, std::size_t count, std::size_t dim) {
  std::vector<ConnectionField> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_instance(seed + k, dim, 2).conn);
  return out;
}

}  // namespace

TEST(Curvature, MatchesOracleLoops) {
  for (std::size_t dim : {2u, 3u}) {
    auto conn = random_instance(50 + dim, dim, 2).conn;
    EXPECT_EQ(curvature_R(conn.sym()), oracle::curvature(conn.full())) << dim;
  }
}

TEST(Curvature, AntisymmetricInLastPairAndBianchi) {
  auto conn = random_instance(61, 3, 2).conn;
  TensorField R = curvature_R(conn.sym());
  EXPECT_EQ(R + swap_lower(R, 1, 2), TensorField(3, {1, 3}));
  // First Bianchi identity R^i_{jmn} + R^i_{mnj} + R^i_{njm} = 0.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t m = 0; m < 3; ++m)
        for (std::size_t q = 0; q < 3; ++q) EXPECT_TRUE((R(i, j, m, q) + R(i, m, q, j) + R(i, q, j, m)).is_zero());
}

TEST(Curvature, RejectsNonSymmetricInput) {
  auto conn = random_instance(62, 3, 1).conn;
  EXPECT_THROW(curvature_R(conn.full()), std::invalid_argument);
}

TEST(Curvature, FlatForConstantConnectionWithCommutingProducts) {
  // Constant diagonal symbols L^i_{ii} = 1 commute, so the curvature vanishes.
  TensorField L(3, {1, 2});
  for (std::size_t i = 0; i < 3; ++i) L(i, i, i) = Polynomial::constant(3, Rational(1));
  EXPECT_TRUE(curvature_R(L).is_zero());
}

TEST(RhoFamily, ListedMembersMatchCatalogue) {
  const auto& cat = rho_catalogue();
  const auto& rows = oracle::listed_rho_members();
  ASSERT_EQ(cat.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(cat[k].c, from_array(rows[k])) << cat[k].id;
    EXPECT_EQ(cat[k].id, "eq:rho" + std::to_string(k + 1));
  }
}

TEST(RhoFamily, EveryMemberMatchesOracle) {
  auto conn = random_instance(70, 2, 2).conn;
  auto basis = rho_basis(conn);
  for (const auto& row : oracle::listed_rho_members())
    EXPECT_EQ(rho(from_array(row), basis), oracle::rho_member(row, conn.full()));
}

TEST(RhoFamily, ReducesToCurvatureWithoutTorsion) {
  auto conn = random_instance(71, 3, 2).conn;
  ConnectionField sym(conn.sym());
  TensorField R = curvature_R(sym.sym());
  for (const auto& e : rho_catalogue()) EXPECT_EQ(rho(e.c, sym), R) << e.id;
}

TEST(RhoFamily, SwappingLastPairMapsBetweenMembers) {
  auto conn = random_instance(72, 3, 2).conn;
  auto basis = rho_basis(conn);
  for (const auto& e : rho_catalogue()) {
    const auto& c = e.c;
    RhoCoefficients swapped{-c.u_prime, -c.u, -c.v_prime, -c.v, c.w};
    EXPECT_EQ(swap_lower(rho(c, basis), 1, 2), rho(swapped, basis) * Rational(-1)) << e.id;
  }
}

TEST(RhoFamily, CoefficientRanks) {
  EXPECT_EQ(rho_family_rank({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}), 6u);
  for (const auto& s : independent_rho_sets()) EXPECT_EQ(rho_family_rank(s), 6u);
  EXPECT_EQ(rho_family_rank({0}), 1u);
  EXPECT_EQ(rho_family_rank({2, 3}), 2u);
  // Appending a member never lowers the rank.
  std::vector<RhoMember> grow;
  std::size_t prev = 0;
  for (RhoMember m = 0; m <= 14; ++m) {
    grow.push_back(m);
    std::size_t r = rho_family_rank(grow);
    EXPECT_GE(r, prev);
    EXPECT_LE(r, 6u);
    prev = r;
  }
  EXPECT_THROW(rho_family_rank({}), std::invalid_argument);
  EXPECT_THROW(rho_member_coefficients(15), std::out_of_range);
}

TEST(RhoFamily, SampledRankAgreesWithCoefficientRank) {
  auto samples = connections(80, 2, 3);
  for (const auto& s : independent_rho_sets()) EXPECT_EQ(sampled_rho_rank(s, samples), 6u);
  EXPECT_EQ(sampled_rho_rank({2, 3, 9}, samples), rho_family_rank({2, 3, 9}));
}

TEST(RhoFamily, SampledRankDropsWithoutTorsion) {
  std::vector<ConnectionField> sym;
  for (const auto& c : connections(90, 2, 3)) sym.emplace_back(c.sym());
  EXPECT_EQ(sampled_rho_rank({1, 2, 3, 4, 7, 10}, sym), 1u);
}

TEST(Brackets, RawAndSplitFormsAgree) {
  auto inst = random_instance(95, 3, 2);
  auto objs = bracket_objects(inst.a, inst.conn);
  ASSERT_EQ(objs.size(), 5u);
  for (const auto& o : objs) EXPECT_EQ(o.raw, o.split) << o.id;
}

TEST(Brackets, PrintedSplitsOfSecondAndThirdAreHalfTheRawValue) {
  auto inst = random_instance(96, 3, 2);
  for (const auto& o : bracket_objects(inst.a, inst.conn)) {
    if (o.id == "eq:<>2" || o.id == "eq:<>3") {
      EXPECT_NE(o.raw, o.split_as_printed) << o.id;
      EXPECT_EQ(o.raw, o.split_as_printed * Rational(2)) << o.id;
    } else {
      EXPECT_EQ(o.split, o.split_as_printed) << o.id;
    }
  }
}

TEST(Brackets, RequireMixedField) {
  auto inst = random_instance(97, 2, 1);
  EXPECT_THROW(bracket_objects(TensorField(2, {0, 2}), inst.conn), std::invalid_argument);
}
