#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "nsac/cli/commands.hpp"

namespace {

using namespace nsac::cli;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool json = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "JSON configuration file");
  sub->add_option("--seed", o.seed, "override the configured seed");
  sub->add_option("--out", o.out, "write the JSON report to this path");
  sub->add_flag("--json", o.json, "print the JSON report on stdout");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

int emit(const Report& rep, const RunConfig& cfg, const CommonOptions& o) {
  const bool timing = timing_requested();
  const std::string json = rep.to_json(timing).dump(2) + "\n";
  const std::string out = o.out.empty() ? cfg.output : o.out;
  if (!out.empty()) {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot write report to '" + out + "'");
    f << json;
  }
  if (o.json) {
    std::cout << json;
  } else {
    std::cout << rep.to_text();
  }
  return rep.failed() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of covariant-derivative, Ricci-type and curvature identities for non-symmetric affine connections"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  CommonOptions opts;
  std::string scope = "catalogue";
  auto* deriv = app.add_subcommand("verify-derivatives", "derivative relations, double derivatives and kind ranks");
  auto* ricci = app.add_subcommand("verify-ricci", "Ricci-type identities");
  auto* rho = app.add_subcommand("rank-rho", "rank of the curvature tensor family");
  auto* cosmo = app.add_subcommand("cosmology", "four-dimensional generalized Riemannian cosmology");
  for (auto* sub : {deriv, ricci, rho, cosmo}) add_common(sub, opts);
  ricci->add_option("--scope", scope, "catalogue | all (alias all-81) | mixed")->check(CLI::IsMember({"catalogue", "all", "all-81", "mixed"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve(opts);
    if (deriv->parsed()) return emit(cmd_verify_derivatives(cfg), cfg, opts);
    if (ricci->parsed()) return emit(cmd_verify_ricci(cfg, parse_scope(scope)), cfg, opts);
    if (rho->parsed()) return emit(cmd_rank_rho(cfg), cfg, opts);
    if (cosmo->parsed()) return emit(cmd_cosmology(cfg), cfg, opts);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const CommandError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
