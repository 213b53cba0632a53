#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsac/cli/config.hpp"
#include "nsac/cli/report.hpp"
#include "nsac/connection.hpp"
#include "nsac/curvature.hpp"
#include "nsac/grspace.hpp"
#include "nsac/parallel.hpp"
#include "nsac/random.hpp"
#include "nsac/ricci.hpp"

namespace nsac::cli {

// Configuration is valid but the requested computation cannot run on it.
class CommandError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RicciScope { Catalogue, All, Mixed };

inline RicciScope parse_scope(const std::string& s) {
  if (s == "catalogue") return RicciScope::Catalogue;
  if (s == "all" || s == "all-81") return RicciScope::All;
  if (s == "mixed") return RicciScope::Mixed;
  throw ConfigError("scope must be one of catalogue, all (or all-81), mixed (got '" + s + "')");
}

namespace detail {

inline std::string strip_eq(const std::string& id) { return id.rfind("eq:", 0) == 0 ? id.substr(3) : id; }

inline std::uint64_t instance_seed(const RunConfig& cfg, std::size_t i) { return derive_seed(cfg.seed, i); }

inline std::vector<IdentitySample> make_samples(const RunConfig& cfg) {
  return parallel_map(cfg.instances, [&](std::size_t i) {
    return random_identity_sample(instance_seed(cfg, i), cfg.dimension, cfg.degree);
  });
}

inline Json int_vector(const IdentityVector& v) {
  Json a = Json::array();
  for (int x : v) a.push_back(x);
  return a;
}

inline std::string one_based_label(std::size_t a, std::size_t j, std::size_t k) {
  return std::to_string(a + 1) + "." + std::to_string(j + 1) + std::to_string(k + 1);
}

}  // namespace detail

inline Report cmd_verify_derivatives(const RunConfig& cfg) {
  Report rep;
  rep.command = "verify-derivatives";
  rep.config = cfg.echo();
  const auto& relations = derivative_relations();
  constexpr std::size_t kPairs = 9;

  struct PerInstance {
    std::vector<ResidualTracker> relation;
    std::vector<ResidualTracker> second;
  };
  Stopwatch sw;
  auto results = parallel_map(cfg.instances, [&](std::size_t i) {
    auto inst = random_instance(detail::instance_seed(cfg, i), cfg.dimension, cfg.degree);
    PerInstance out;
    for (const auto& r : verify_derivative_relations(inst.conn, inst.a)) {
      ResidualTracker t;
      t.add(r.residual);
      out.relation.push_back(t);
    }
    for (int p = 1; p <= 3; ++p)
      for (int q = 1; q <= 3; ++q) {
        ResidualTracker t;
        t.add(double_covariant_derivative(kind_from_index(p), kind_from_index(q), inst.a, inst.conn) -
              double_covariant_derivative_expanded(kind_from_index(p), kind_from_index(q), inst.a, inst.conn));
        out.second.push_back(t);
      }
    return out;
  });
  const double elapsed = sw.seconds();

  for (std::size_t k = 0; k < relations.size(); ++k) {
    ResidualTracker t;
    for (const auto& r : results) t.merge(r.relation[k]);
    auto c = Check::from_residual(relations[k].id, detail::strip_eq(relations[k].id), cfg.instances, t);
    c.elapsed = elapsed;
    rep.checks.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < kPairs; ++k) {
    ResidualTracker t;
    for (const auto& r : results) t.merge(r.second[k]);
    const std::string pq = std::to_string(k / 3 + 1) + std::to_string(k % 3 + 1);
    auto c = Check::from_residual("eq:||" + pq, "||" + pq, cfg.instances, t);
    c.elapsed = elapsed;
    rep.checks.push_back(std::move(c));
  }
  auto kinds_json = [](const std::vector<DerivKind>& ks) {
    Json a = Json::array();
    for (auto k : ks) a.push_back(to_string(k));
    return a;
  };
  for (const auto& t : independent_kind_triples()) {
    auto c = Check::from_rank("thm1:" + t.name, "thm1", 3, derivative_kind_rank(t.kinds));
    c.detail["kinds"] = kinds_json(t.kinds);
    rep.checks.push_back(std::move(c));
  }
  for (const auto& t : dependent_kind_triples()) {
    auto c = Check::from_rank("cor1:" + t.name, "cor1", 2, derivative_kind_rank(t.kinds));
    c.detail["kinds"] = kinds_json(t.kinds);
    rep.checks.push_back(std::move(c));
  }
  rep.sort();
  return rep;
}

namespace detail {

inline void ricci_catalogue(const RunConfig& cfg, Report& rep) {
  Stopwatch sw;
  auto samples = make_samples(cfg);
  const auto& cat = identity_catalogue();
  struct Outcome {
    ResidualTracker corrected;
    ResidualTracker printed;
  };
  auto outcomes = parallel_map(cat.size(), [&](std::size_t e) {
    Outcome o;
    for (const auto& s : samples) {
      TensorField lhs = s.lhs(cat[e].key);
      o.corrected.add(lhs - evaluate_identity_rhs(cat[e].coefficients, s.terms));
      if (cat[e].has_erratum()) o.printed.add(lhs - evaluate_identity_rhs(cat[e].printed, s.terms));
    }
    return o;
  });
  const double elapsed = sw.seconds();
  for (std::size_t e = 0; e < cat.size(); ++e) {
    auto c = Check::from_residual(cat[e].id(), cat[e].key.tag(), cfg.instances, outcomes[e].corrected);
    c.detail["coefficients"] = int_vector(cat[e].coefficients);
    c.elapsed = elapsed;
    if (cat[e].has_erratum()) {
      c.message = "published coefficient row corrected";
      auto er = Check::from_residual("erratum:" + cat[e].key.tag(), cat[e].key.tag(), cfg.instances,
                                     outcomes[e].printed);
      er.detail["published"] = int_vector(cat[e].printed);
      er.detail["corrected"] = int_vector(cat[e].coefficients);
      rep.errata.push_back(std::move(er));
    }
    rep.checks.push_back(std::move(c));
  }
}

inline void ricci_all(const RunConfig& cfg, Report& rep) {
  Stopwatch sw;
  IdentitySolver solver(make_samples(cfg));
  const auto keys = all_identity_keys();
  auto results = parallel_map(keys.size(), [&](std::size_t k) { return solver.solve(keys[k]); });
  const double elapsed = sw.seconds();

  std::vector<IdentityVector> solved;
  std::vector<IdentityKey> catalogued_keys;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto& r = results[k];
    Check c;
    c.id = "thm2:" + keys[k].tag();
    c.tag = keys[k].tag();
    c.instances = cfg.instances;
    c.elapsed = elapsed;
    const CatalogueEntry* entry = find_catalogue_entry(keys[k]);
    c.detail["catalogued"] = entry != nullptr;
    if (r.ok()) {
      auto v = r.as_integers();
      solved.push_back(v);
      c.detail["coefficients"] = int_vector(v);
      c.pass = true;
      if (entry) {
        catalogued_keys.push_back(keys[k]);
        if (v != entry->coefficients) {
          c.pass = false;
          c.message = "solution differs from the catalogue row";
        }
      }
    } else {
      c.pass = false;
      c.message = to_string(r.status) + (r.message.empty() ? "" : ": " + r.message);
    }
    rep.checks.push_back(std::move(c));
  }
  auto span = Check::from_rank("cor2:span-rank", "cor2", kIdentityTerms, coefficient_span_rank(solved));
  span.detail["solved"] = solved.size();
  span.detail["catalogue_rank"] = catalogue_independence_rank();
  span.detail["lhs_formal_rank_all"] = lhs_formal_rank(keys);
  std::vector<IdentityKey> cat_keys;
  for (const auto& e : identity_catalogue()) cat_keys.push_back(e.key);
  span.detail["lhs_formal_rank_catalogue"] = lhs_formal_rank(cat_keys);
  span.detail["design_rank"] = solver.design_rank();
  rep.checks.push_back(std::move(span));
}

inline void ricci_mixed(const RunConfig& cfg, Report& rep) {
  constexpr std::size_t kRandomWeights = 5;
  Stopwatch sw;
  auto samples = make_samples(cfg);
  auto shapes = parallel_map(samples.size(), [&](std::size_t i) {
    return mixed_family_shapes(samples[i].a, samples[i].conn);
  });
  const auto& cat = identity_catalogue();
  struct Outcome {
    ResidualTracker corrected;
    ResidualTracker printed;
    std::size_t weights = 0;
  };
  auto outcomes = parallel_map(cat.size(), [&](std::size_t e) {
    std::vector<MixWeights> ds;
    if (cfg.mix_weights) {
      ds.emplace_back(*cfg.mix_weights);
    } else {
      FieldGenerator gen(derive_seed(cfg.seed, 0x6d69780000ULL + e), {cfg.dimension, cfg.degree, 3});
      for (std::size_t w = 0; w < kRandomWeights; ++w) ds.push_back(MixWeights::random(gen));
    }
    Outcome o;
    o.weights = ds.size();
    for (std::size_t s = 0; s < samples.size(); ++s) {
      TensorField lhs = samples[s].lhs(cat[e].key);
      for (const auto& d : ds) {
        o.corrected.add(lhs - mixed_family_rhs(cat[e].coefficients, d, samples[s].terms, shapes[s], false));
        o.printed.add(lhs - mixed_family_rhs(cat[e].coefficients, d, samples[s].terms, shapes[s], true));
      }
    }
    return o;
  });
  const double elapsed = sw.seconds();
  for (std::size_t e = 0; e < cat.size(); ++e) {
    const std::string tag = cat[e].key.tag();
    auto c = Check::from_residual("cor3:" + tag, "riccitypeid123", cfg.instances, outcomes[e].corrected);
    c.detail["weight_matrices"] = outcomes[e].weights;
    c.elapsed = elapsed;
    rep.checks.push_back(std::move(c));
    auto er = Check::from_residual("erratum:riccitypeid123:" + tag, "riccitypeid123", cfg.instances,
                                   outcomes[e].printed);
    er.detail["form"] = "published bracket corrections";
    rep.errata.push_back(std::move(er));
  }
}

}  // namespace detail

inline Report cmd_verify_ricci(const RunConfig& cfg, RicciScope scope) {
  Report rep;
  rep.config = cfg.echo();
  switch (scope) {
    case RicciScope::Catalogue:
      rep.command = "verify-ricci --scope catalogue";
      detail::ricci_catalogue(cfg, rep);
      break;
    case RicciScope::All:
      rep.command = "verify-ricci --scope all";
      detail::ricci_all(cfg, rep);
      break;
    case RicciScope::Mixed:
      rep.command = "verify-ricci --scope mixed";
      detail::ricci_mixed(cfg, rep);
      break;
  }
  rep.sort();
  return rep;
}

inline Report cmd_rank_rho(const RunConfig& cfg) {
  Report rep;
  rep.command = "rank-rho";
  rep.config = cfg.echo();
  std::vector<RhoMember> all;
  for (RhoMember m = 1; m <= 14; ++m) all.push_back(m);
  auto full = Check::from_rank("thm3:catalogue", "thm3", 6, rho_family_rank(all));

  // Secondary diagnostic: the same members evaluated as tensors on random connections.
  std::vector<ConnectionField> conns;
  for (std::size_t i = 0; i < cfg.instances; ++i)
    conns.push_back(random_instance(detail::instance_seed(cfg, i), cfg.dimension, cfg.degree).conn);
  std::vector<RhoMember> with_r = all;
  with_r.push_back(0);
  full.detail["sampled_rank_with_R"] = sampled_rho_rank(with_r, conns);
  full.instances = cfg.instances;
  rep.checks.push_back(std::move(full));

  const auto& sets = independent_rho_sets();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    auto c = Check::from_rank("cor4:set" + std::to_string(k + 1), "cor4", 6, rho_family_rank(sets[k]));
    Json members = Json::array();
    for (RhoMember m : sets[k]) members.push_back(m == 0 ? std::string("R") : "rho" + std::to_string(m));
    c.detail["members"] = members;
    rep.checks.push_back(std::move(c));
  }
  rep.sort();
  return rep;
}

inline Report cmd_cosmology(const RunConfig& cfg) {
  if (!cfg.cosmology) throw ConfigError("field 'cosmology': required by the cosmology command");
  const CosmologyConfig& cc = *cfg.cosmology;
  const CosmologyMetric& cm = cc.metric;
  Report rep;
  rep.command = "cosmology";
  rep.config = cfg.echo();

  // Every quadrature node must avoid zeros of the s_i.
  const Rational node_width = (cc.t1 - cc.t0) / Rational(static_cast<long>(2 * cc.steps));
  for (std::size_t k = 0; k <= 2 * cc.steps; ++k) {
    try {
      cm.check_nonvanishing(cc.t0 + node_width * Rational(static_cast<long>(k)));
    } catch (const std::domain_error& e) {
      throw CommandError(e.what());
    }
  }
  std::vector<Rational> sample_t;
  for (long k = 0; k <= 4; ++k) sample_t.push_back(cc.t0 + (cc.t1 - cc.t0) * Rational(k, 4));
  auto sampled = [&](const TimeFunction& f) {
    Json a = Json::array();
    for (const auto& t : sample_t) a.push_back(f.evaluate(t).to_double());
    return a;
  };

  const auto metric = cm.generalized();
  {
    auto gamma = christoffel_first_kind_antisym(metric);
    auto reference = antisym_christoffel_reference(cm);
    Check c;
    c.id = "eq:gammabantisim";
    c.tag = "gammabantisim";
    c.pass = gamma == reference;
    Json table = Json::object();
    for (std::size_t f = 0; f < gamma.size(); ++f)
      if (!gamma[f].is_zero()) {
        auto idx = gamma.indices(f);
        table[detail::one_based_label(idx[0], idx[1], idx[2])] = gamma[f].to_string();
      }
    c.detail["nonzero_entries"] = table;
    if (!c.pass) c.message = "antisymmetric first-kind symbols differ from the published pattern";
    rep.checks.push_back(std::move(c));
  }

  const TimeFunction lm_contraction = matter_lagrangian_contraction(cm);
  const TimeFunction lm_closed = matter_lagrangian_closed_form(cm);
  {
    auto fam = scalar_curvature_family(cm);
    Check c;
    c.id = "eq:physscalarcurvaturefamily";
    c.tag = "physscalarcurvaturefamily";
    c.pass = fam.value - fam.scalar_R == lm_closed;
    c.detail["R"] = fam.scalar_R.to_string();
    c.detail["rho_bar"] = fam.value.to_string();
    c.detail["rho_bar_samples"] = sampled(fam.value);
    if (!c.pass) c.message = "rho_bar - R differs from the closed-form matter Lagrangian";
    rep.checks.push_back(std::move(c));
  }
  {
    Check c;
    c.id = "eq:LMtorsion";
    c.tag = "LMtorsion=LMb";
    c.pass = lm_contraction == lm_closed;
    c.detail["contraction"] = lm_contraction.to_string();
    c.detail["closed_form"] = lm_closed.to_string();
    c.detail["sample_t"] = sampled(TimeFunction(UPoly::t()));
    c.detail["samples"] = sampled(lm_closed);
    rep.checks.push_back(std::move(c));
  }
  {
    Check c;
    c.id = "eq:2nLM";
    c.tag = "2nLM";
    try {
      auto rec = recover_n(cm, cc.t0, cc.t1, cc.steps);
      bool symmetric = true;
      for (std::size_t k = 0; k < rec.n1.size(); ++k) symmetric = symmetric && rec.n1[k] == -rec.n2[k];
      // The analytic value needs n' of one sign across the window.
      const UPoly dn = cm.n.derivative();
      int sign = 0;
      bool monotone = true;
      for (std::size_t k = 0; k <= 2 * cc.steps && monotone; ++k) {
        int sg = dn.evaluate(cc.t0 + node_width * Rational(static_cast<long>(k))).sign();
        if (sg != 0 && sign != 0 && sg != sign) monotone = false;
        if (sg != 0) sign = sg;
      }
      const double scale = std::sqrt(2.0 / (3.0 * cm.vprime_minus_w.to_double()));
      const double n0 = cm.n.evaluate(cc.t0).to_double();
      double max_err = 0;
      Json samples = Json::array();
      const std::size_t stride = std::max<std::size_t>(1, cc.steps / 10);
      for (std::size_t k = 0; k < rec.t.size(); ++k) {
        const double analytic = scale * std::abs(cm.n.evaluate(rec.t[k]) - n0);
        max_err = std::max(max_err, std::abs(rec.n1[k] - analytic));
        if (k % stride == 0 || k + 1 == rec.t.size())
          samples.push_back({{"t", rec.t[k]}, {"n1", rec.n1[k]}, {"n2", rec.n2[k]}, {"analytic", analytic}});
      }
      c.detail["scale"] = scale;
      c.detail["panels"] = cc.steps;
      c.detail["samples"] = samples;
      c.pass = symmetric;
      if (monotone) {
        c.detail["max_abs_error"] = max_err;
        c.pass = c.pass && max_err <= 1e-8;
      } else {
        c.message = "n' changes sign on the window; analytic comparison skipped";
      }
    } catch (const std::domain_error& e) {
      c.pass = false;
      c.message = e.what();
    }
    rep.checks.push_back(std::move(c));
  }
  {
    auto T = energy_momentum(cm);
    bool diagonal = true, symmetric = true;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        if (i != j && !T(i, j).is_zero()) diagonal = false;
        if (!(T(i, j) == T(j, i))) symmetric = false;
      }
    const bool t44 = T(3, 3) == TimeFunction(cm.s[3]) * lm_closed;
    Check c;
    c.id = "eq:energy-momentum";
    c.tag = "energy-momentum";
    c.pass = diagonal && symmetric && t44;
    Json diag = Json::array();
    for (std::size_t i = 0; i < 4; ++i) diag.push_back(T(i, i).to_string());
    c.detail["diagonal"] = diag;
    c.detail["off_diagonal_zero"] = diagonal;
    c.detail["T44_equals_s4_LM"] = t44;
    rep.checks.push_back(std::move(c));
  }
  rep.sort();
  return rep;
}

}  // namespace nsac::cli
