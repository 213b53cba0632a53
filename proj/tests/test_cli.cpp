#include <gtest/gtest.h>

#include <cstdlib>
#include <string>

#include "nsac/cli/commands.hpp"

using namespace nsac;
using namespace nsac::cli;

namespace {

const char* kCosmology = R"({
  "cosmology": {
    "polynomials": [["-1"], [1, 1], [2, 0, 1], [1], [0, 1, 1]],
    "vprime_minus_w": "3/2",
    "t0": 0, "t1": 1, "steps": 200
  }
})";

RunConfig small(std::size_t dim, std::size_t instances) {
  RunConfig c;
  c.dimension = dim;
  c.instances = instances;
  c.degree = 1;
  c.seed = 7;
  return c;
}

const Check* find(const Report& r, const std::string& id) {
  for (const auto& c : r.checks)
    if (c.id == id) return &c;
  return nullptr;
}

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  auto cfg = parse_config(R"({"dimension": 4, "seed": 99, "degree": 3, "instances": 5, "output": "r.json"})");
  EXPECT_EQ(cfg.dimension, 4u);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.degree, 3u);
  EXPECT_EQ(cfg.instances, 5u);
  EXPECT_EQ(cfg.output, "r.json");
  auto def = parse_config("{}");
  EXPECT_EQ(def.dimension, 3u);
  EXPECT_FALSE(def.cosmology);
}

TEST(Config, RejectsInvalidInput) {
  for (const char* bad : {
           "[1, 2]",
           "{not json",
           R"({"dimenson": 3})",
           R"({"dimension": 1})",
           R"({"dimension": 7})",
           R"({"degree": 0})",
           R"({"instances": 0})",
           R"({"seed": -1})",
           R"({"output": 3})",
           R"({"mix_weights": [[1, 0, 0]]})",
           R"({"mix_weights": [[1,0,0],[1,0,0],[1,0,0],[1,0,0],["1/2","1/3",0]]})",
           R"({"cosmology": {"polynomials": [[1], [1], [1], [1]]}})",
           R"({"cosmology": {"polynomials": [[1], [1], [0], [1], [0, 1]]}})",
           R"({"cosmology": {"polynomials": [[1], [1], [1], [1], [0, 1]], "t0": 1, "t1": 1}})",
           R"({"cosmology": {"polynomials": [[1], [1], [1], [1], [0, 1]], "steps": 0}})",
           R"({"cosmology": {"polynomials": [[1], [1], [1], [1], ["x"]]}})",
           R"({"cosmology": {"polynomials": [[1], [1], [1], [1], [0, 1]], "extra": 1}})",
       })
    EXPECT_THROW(parse_config(bad), ConfigError) << bad;
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
  EXPECT_THROW(parse_scope("everything"), ConfigError);
  EXPECT_EQ(parse_scope("all-81"), RicciScope::All);
  EXPECT_EQ(parse_scope("all"), RicciScope::All);
}

TEST(Config, MixWeightsAndCosmologyParse) {
  auto cfg = parse_config(
      R"({"mix_weights": [["1/2","1/2",0],[1,0,0],[0,1,0],[0,0,1],["-1","1","1"]]})");
  ASSERT_TRUE(cfg.mix_weights);
  EXPECT_EQ((*cfg.mix_weights)[0][0], Rational(1, 2));
  auto cc = parse_config(kCosmology);
  ASSERT_TRUE(cc.cosmology);
  EXPECT_EQ(cc.cosmology->metric.vprime_minus_w, Rational(3, 2));
  EXPECT_EQ(cc.cosmology->steps, 200u);
  EXPECT_EQ(cc.echo()["cosmology"]["polynomials"][4][2], "1");
}

TEST(Commands, DerivativeChecksPass) {
  auto rep = cmd_verify_derivatives(small(2, 1));
  EXPECT_EQ(rep.failed(), 0u) << rep.to_text();
  ASSERT_NE(find(rep, "eq:0|=1|+2|"), nullptr);
  ASSERT_NE(find(rep, "thm1:b8"), nullptr);
  EXPECT_EQ(find(rep, "cor1:sym-3-4")->detail["rank"], 2);
}

TEST(Commands, CatalogueCheckReportsErratum) {
  auto rep = cmd_verify_ricci(small(3, 1), RicciScope::Catalogue);
  EXPECT_EQ(rep.checks.size(), 17u);
  EXPECT_EQ(rep.failed(), 0u) << rep.to_text();
  ASSERT_EQ(rep.errata.size(), 1u);
  EXPECT_FALSE(rep.errata[0].pass);
}

TEST(Commands, FullSweepFailsOnlyOnSpanRank) {
  RunConfig cfg = small(3, 2);
  cfg.degree = 2;
  auto rep = cmd_verify_ricci(cfg, RicciScope::All);
  EXPECT_EQ(rep.checks.size(), 82u);
  EXPECT_EQ(rep.failed(), 1u);
  const Check* span = find(rep, "cor2:span-rank");
  ASSERT_NE(span, nullptr);
  EXPECT_FALSE(span->pass);
  EXPECT_EQ(span->detail["rank"], 15);
  EXPECT_EQ(span->detail["expected_rank"], 17);
}

TEST(Commands, MixedFamilyWithConfiguredWeights) {
  auto cfg = parse_config(
      R"({"dimension": 2, "degree": 1, "instances": 1,
          "mix_weights": [["1/2","1/2",0],[1,0,0],[0,1,0],[0,0,1],["-1","1","1"]]})");
  auto rep = cmd_verify_ricci(cfg, RicciScope::Mixed);
  EXPECT_EQ(rep.checks.size(), 17u);
  EXPECT_EQ(rep.failed(), 0u) << rep.to_text();
}

TEST(Commands, RhoRanksPass) {
  auto rep = cmd_rank_rho(small(3, 1));
  EXPECT_EQ(rep.checks.size(), 4u);
  EXPECT_EQ(rep.failed(), 0u);
}

TEST(Commands, CosmologyChecksPass) {
  auto rep = cmd_cosmology(parse_config(kCosmology));
  EXPECT_EQ(rep.failed(), 0u) << rep.to_text();
  EXPECT_NE(find(rep, "eq:2nLM"), nullptr);
  EXPECT_NE(find(rep, "eq:energy-momentum"), nullptr);
  EXPECT_THROW(cmd_cosmology(RunConfig{}), ConfigError);
}

TEST(Commands, CosmologyRejectsZeroOfMetricInWindow) {
  auto cfg = parse_config(R"({"cosmology": {"polynomials": [[1], ["-1/2", 1], [1], [1], [0, 1]], "steps": 4}})");
  EXPECT_THROW(cmd_cosmology(cfg), CommandError);
}

TEST(Report, JsonLayoutIsStable) {
  auto rep = cmd_rank_rho(small(2, 1));
  auto j = rep.to_json(false);
  std::vector<std::string> keys;
  for (const auto& [k, _] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"tool", "version", "command", "config", "checks", "summary"}));
  EXPECT_FALSE(j["checks"][0].contains("elapsed_s"));
  EXPECT_TRUE(rep.to_json(true)["checks"][0].contains("elapsed_s"));
  EXPECT_EQ(j["summary"]["fail"], 0);
}

TEST(Report, ChecksAreSortedById) {
  auto rep = cmd_verify_derivatives(small(2, 1));
  for (std::size_t k = 1; k < rep.checks.size(); ++k) EXPECT_LE(rep.checks[k - 1].id, rep.checks[k].id);
}

TEST(Determinism, ReportIndependentOfWorkerCount) {
  RunConfig cfg = small(2, 3);
  setenv("NSAC_WORKERS", "1", 1);
  const std::string one = cmd_verify_ricci(cfg, RicciScope::Catalogue).to_json(false).dump(2);
  setenv("NSAC_WORKERS", "3", 1);
  const std::string three = cmd_verify_ricci(cfg, RicciScope::Catalogue).to_json(false).dump(2);
  unsetenv("NSAC_WORKERS");
  EXPECT_EQ(one, three);
}

TEST(Determinism, SeedChangesSampledDiagnostics) {
  RunConfig a = small(2, 1), b = small(2, 1);
  b.seed = 8;
  EXPECT_EQ(cmd_rank_rho(a).to_json(false).dump(), cmd_rank_rho(a).to_json(false).dump());
  EXPECT_NE(cmd_rank_rho(a).to_json(false)["config"], cmd_rank_rho(b).to_json(false)["config"]);
}
