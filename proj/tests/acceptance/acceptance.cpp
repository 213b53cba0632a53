// Acceptance suite: one PASS/FAIL line per criterion. Run with no arguments for
// all of them or with `--criterion N` for one.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nsac/cli/commands.hpp"

using namespace nsac;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;  // informational lines printed under the verdict

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct Criterion {
  int number;
  std::string title;
  double time_limit;  // seconds; 0 means no limit
  std::function<Outcome()> run;
};

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

// 1. Ten derivative relations, 20 pairs at each N in {2, 3, 4}.
Outcome relations() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t n : {2u, 3u, 4u}) {
    auto ok = parallel_map(20, [&](std::size_t i) {
      auto inst = random_instance(derive_seed(kSeed + n, i), n, 2);
      for (const auto& r : verify_derivative_relations(inst.conn, inst.a))
        if (!r.residual.is_zero()) return r.id;
      return std::string();
    });
    for (std::size_t i = 0; i < ok.size(); ++i) {
      if (!ok[i].empty()) o.fail(ok[i] + " nonzero at N=" + std::to_string(n) + " instance " + std::to_string(i));
      checked += 10;
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " relation residuals exact-zero";
  return o;
}

// 2. Kind-triple ranks.
Outcome kind_ranks() {
  Outcome o;
  for (const auto& t : independent_kind_triples())
    if (derivative_kind_rank(t.kinds) != 3) o.fail(t.name + " rank " + std::to_string(derivative_kind_rank(t.kinds)));
  for (const auto& t : dependent_kind_triples())
    if (derivative_kind_rank(t.kinds) != 2) o.fail(t.name + " rank " + std::to_string(derivative_kind_rank(t.kinds)));
  if (o.pass) o.detail = "b1..b8 rank 3, {sym,1,2} and {sym,3,4} rank 2";
  return o;
}

// 3. Composed second derivatives against the expanded forms, 20 instances at N=3.
Outcome double_derivatives() {
  Outcome o;
  auto bad = parallel_map(20, [](std::size_t i) {
    auto inst = random_instance(derive_seed(kSeed + 30, i), 3, 2);
    for (int p = 1; p <= 3; ++p)
      for (int q = 1; q <= 3; ++q) {
        DerivKind kp = kind_from_index(p), kq = kind_from_index(q);
        if (double_covariant_derivative(kp, kq, inst.a, inst.conn) !=
            double_covariant_derivative_expanded(kp, kq, inst.a, inst.conn))
          return std::to_string(p) + std::to_string(q);
      }
    return std::string();
  });
  for (std::size_t i = 0; i < bad.size(); ++i)
    if (!bad[i].empty()) o.fail("pair " + bad[i] + " differs on instance " + std::to_string(i));
  if (o.pass) o.detail = "9 pairs x 20 instances exact";
  return o;
}

// 4. The catalogued identities, 20 instances at N=3.
Outcome catalogue() {
  Outcome o;
  auto bad = parallel_map(20, [](std::size_t i) {
    auto s = random_identity_sample(derive_seed(kSeed + 40, i), 3, 2);
    std::string failed;
    for (const auto& e : identity_catalogue())
      if (!identity_holds(e.key, e.coefficients, s)) failed += " " + e.key.tag();
    return failed;
  });
  for (std::size_t i = 0; i < bad.size(); ++i)
    if (!bad[i].empty()) o.fail("instance " + std::to_string(i) + ":" + bad[i]);
  if (o.pass) o.detail = "17 identities x 20 instances exact-zero";
  const auto* e = find_catalogue_entry({1, 3, 1, 2});
  auto s = random_identity_sample(derive_seed(kSeed + 40, 0), 3, 2);
  o.notes.push_back(std::string("published row ric13-12 ") +
                    (identity_holds(e->key, e->printed, s) ? "HOLDS" : "DIFFERS (second and fourth coefficients exchanged)"));
  return o;
}

// 5. Full sweep of 81 combinations at N=3 and N=4.
Outcome sweep() {
  Outcome o;
  std::vector<std::string> summary;
  for (std::size_t n : {3u, 4u}) {
    std::vector<IdentitySample> samples = parallel_map(2, [n](std::size_t i) {
      return random_identity_sample(derive_seed(kSeed + 50 + n, i), n, 2);
    });
    IdentitySolver solver(std::move(samples));
    std::vector<IdentityVector> vecs;
    std::size_t solved = 0, matched = 0;
    for (const auto& k : all_identity_keys()) {
      auto res = solver.solve(k);
      if (!res.ok()) {
        o.fail("N=" + std::to_string(n) + " " + k.tag() + ": " + res.message);
        continue;
      }
      ++solved;
      vecs.push_back(res.as_integers());
      if (const auto* e = find_catalogue_entry(k)) {
        if (res.as_integers() == e->coefficients) {
          ++matched;
        } else {
          o.fail("N=" + std::to_string(n) + " " + k.tag() + " differs from the catalogue");
        }
      }
    }
    const std::size_t rank = coefficient_span_rank(vecs);
    if (rank != 17) o.fail("N=" + std::to_string(n) + ": span rank " + std::to_string(rank) + ", expected 17");
    summary.push_back("N=" + std::to_string(n) + ": " + std::to_string(solved) + "/81 solved in {-1,0,1}, " +
                      std::to_string(matched) + "/17 match catalogue, span rank " + std::to_string(rank));
  }
  for (auto& s : summary) o.notes.push_back(std::move(s));
  std::vector<IdentityKey> cat;
  for (const auto& e : identity_catalogue()) cat.push_back(e.key);
  o.notes.push_back("left-hand sides as formal differences: rank " + std::to_string(lhs_formal_rank(all_identity_keys())) +
                    " (all 81), " + std::to_string(lhs_formal_rank(cat)) + " (catalogue)");
  if (o.pass) o.detail = "81/81 solved, span rank 17";
  return o;
}

// 6. Mixed family with 5 random weight matrices per catalogued combination.
Outcome mixed() {
  Outcome o;
  auto bad = parallel_map(5, [](std::size_t e) {
    FieldGenerator g(derive_seed(kSeed + 60, 1000 + e), {3, 1, 3});
    MixWeights d = MixWeights::random(g);
    auto s = random_identity_sample(derive_seed(kSeed + 60, e), 3, 2);
    auto shapes = mixed_family_shapes(s.a, s.conn);
    std::string failed;
    for (const auto& c : identity_catalogue())
      if (!(s.lhs(c.key) - mixed_family_rhs(c.coefficients, d, s.terms, shapes, false)).is_zero())
        failed += " " + c.key.tag();
    bool printed_holds = true;
    for (const auto& c : identity_catalogue())
      printed_holds = printed_holds && (s.lhs(c.key) - mixed_family_rhs(c.coefficients, d, s.terms, shapes, true)).is_zero();
    return std::make_pair(failed, printed_holds);
  });
  bool printed_all = true;
  for (std::size_t e = 0; e < bad.size(); ++e) {
    if (!bad[e].first.empty()) o.fail("matrix " + std::to_string(e) + ":" + bad[e].first);
    printed_all = printed_all && bad[e].second;
  }
  if (o.pass) o.detail = "17 combinations x 5 weight matrices exact-zero";
  o.notes.push_back(std::string("published bracket weights of the mixed family ") +
                    (printed_all ? "HOLD" : "DIFFER (torsion-derivative terms need weight 2)"));
  return o;
}

// 7. Expanded identity, 10 instances; bracket objects raw vs split.
Outcome expanded() {
  Outcome o;
  struct Result {
    std::string failed;
    bool printed_expanded_holds = true;
    std::vector<std::pair<std::string, bool>> printed_brackets;
  };
  auto res = parallel_map(10, [](std::size_t i) {
    Result r;
    auto inst = random_instance(derive_seed(kSeed + 70, i), 3, 2);
    const auto compact = identity_terms(inst.a, inst.conn);
    const auto derived = expanded_identity_terms(inst.a, inst.conn, false);
    for (const auto& c : identity_catalogue())
      if (evaluate_identity_rhs(c.coefficients, compact) != evaluate_identity_rhs(c.coefficients, derived))
        r.failed += " " + c.key.tag();
    if (i == 0) {
      const auto printed = expanded_identity_terms(inst.a, inst.conn, true);
      for (const auto& c : identity_catalogue())
        if (evaluate_identity_rhs(c.coefficients, compact) != evaluate_identity_rhs(c.coefficients, printed))
          r.printed_expanded_holds = false;
    }
    for (const auto& b : bracket_objects(inst.a, inst.conn)) {
      if (b.raw != b.split) r.failed += " " + b.id;
      r.printed_brackets.emplace_back(b.id, b.raw == b.split_as_printed);
    }
    for (const auto& x : connection_expansion_residuals(inst.a, inst.conn))
      if (!x.is_zero()) r.failed += " connection-split";
    return r;
  });
  for (std::size_t i = 0; i < res.size(); ++i)
    if (!res[i].failed.empty()) o.fail("instance " + std::to_string(i) + ":" + res[i].failed);
  if (o.pass) o.detail = "17 expanded identities x 10 instances and 5 bracket objects exact";
  o.notes.push_back(std::string("published weights of the expanded form ") +
                    (res[0].printed_expanded_holds ? "HOLD" : "DIFFER"));
  for (const auto& [id, holds] : res[0].printed_brackets)
    o.notes.push_back("published split of " + id + (holds ? " HOLDS" : " DIFFERS (off by a factor 2)"));
  return o;
}

// 8. Curvature family ranks.
Outcome rho_ranks() {
  Outcome o;
  std::vector<RhoMember> all;
  for (RhoMember m = 1; m <= 14; ++m) all.push_back(m);
  if (rho_family_rank(all) != 6) o.fail("catalogue rank " + std::to_string(rho_family_rank(all)));
  for (std::size_t k = 0; k < independent_rho_sets().size(); ++k)
    if (rho_family_rank(independent_rho_sets()[k]) != 6)
      o.fail("set " + std::to_string(k + 1) + " rank " + std::to_string(rho_family_rank(independent_rho_sets()[k])));
  if (o.pass) o.detail = "14-member catalogue rank 6, three six-sets rank 6";
  return o;
}

UPoly random_upoly(std::mt19937_64& rng, int degree, bool nonzero_constant) {
  std::uniform_int_distribution<long> d(-4, 4);
  std::vector<Rational> c;
  for (int k = 0; k <= degree; ++k) c.emplace_back(d(rng));
  if (nonzero_constant && c[0].is_zero()) c[0] = Rational(3);
  return UPoly(std::move(c));
}

// 9. Cosmological metric.
Outcome cosmology() {
  Outcome o;
  std::mt19937_64 rng(kSeed + 90);
  std::uniform_int_distribution<long> cw(1, 5);
  auto make = [&] {
    CosmologyMetric cm{{random_upoly(rng, 1, true), random_upoly(rng, 2, true), random_upoly(rng, 1, true),
                        random_upoly(rng, 2, true)},
                       random_upoly(rng, 3, false),
                       Rational(cw(rng), cw(rng))};
    return cm;
  };
  std::size_t tuples = 0;
  for (int k = 0; k < 20; ++k) {
    CosmologyMetric cm = make();
    auto gam = christoffel_first_kind_antisym(cm.generalized());
    if (gam != antisym_christoffel_reference(cm)) o.fail("antisymmetric symbols differ on tuple " + std::to_string(k));
    if (!(gam(0, 1, 2) == TimeFunction(cm.n.derivative()) * Rational(-1, 2)))
      o.fail("entry 1.23 is not -n'/2 on tuple " + std::to_string(k));
    TimeFunction lm = matter_lagrangian_contraction(cm);
    if (lm != matter_lagrangian_closed_form(cm)) o.fail("contraction != closed form on tuple " + std::to_string(k));
    auto T = energy_momentum(cm);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j && !T(i, j).is_zero()) o.fail("energy-momentum not diagonal on tuple " + std::to_string(k));
    if (T(3, 3) != TimeFunction(cm.s[3]) * lm) o.fail("T44 != s4 L_M on tuple " + std::to_string(k));
    ++tuples;
  }

  // Quadrature against |n(t) - n(0)| sqrt(2/(3(v'-w))) for monotone polynomial n on [0, 1].
  const std::vector<CosmologyMetric> cases{
      {{UPoly::constant(Rational(1)), UPoly::constant(Rational(1)), UPoly::constant(Rational(1)), UPoly::constant(Rational(1))},
       UPoly::t(),
       Rational(1)},
      {{UPoly(std::vector<Rational>{Rational(2), Rational(1)}), UPoly::constant(Rational(3)), UPoly::constant(Rational(1)),
        UPoly::constant(Rational(1))},
       UPoly(std::vector<Rational>{Rational(0), Rational(1), Rational(1)}),
       Rational(3, 2)},
      {{UPoly::constant(Rational(-1)), UPoly(std::vector<Rational>{Rational(1), Rational(0), Rational(1)}),
        UPoly::constant(Rational(2)), UPoly::constant(Rational(1))},
       UPoly(std::vector<Rational>{Rational(1), Rational(0), Rational(0), Rational(-2)}),
       Rational(2)},
  };
  double worst = 0;
  for (const auto& cm : cases) {
    auto rec = recover_n(cm, Rational(0), Rational(1), 1000);
    const double scale = std::sqrt(2.0 / (3.0 * cm.vprime_minus_w.to_double()));
    const double n0 = cm.n.evaluate(0.0);
    for (std::size_t k = 0; k < rec.t.size(); ++k)
      worst = std::max(worst, std::abs(rec.n1[k] - scale * std::abs(cm.n.evaluate(rec.t[k]) - n0)));
  }
  if (worst >= 1e-8) {
    std::ostringstream os;
    os << "quadrature error " << worst << " >= 1e-8";
    o.fail(os.str());
  }
  if (o.pass) {
    std::ostringstream os;
    os << tuples << " tuples exact; quadrature max error " << worst;
    o.detail = os.str();
  }
  return o;
}

// 10. Identical config and seed give byte-identical reports, whatever the worker count.
Outcome determinism() {
  Outcome o;
  auto cfg = cli::parse_config(R"({"dimension": 3, "seed": 5, "degree": 2, "instances": 2,
      "cosmology": {"polynomials": [["-1"], [1, 1], [2, 0, 1], [1], [0, 1, 1]], "vprime_minus_w": "3/2", "steps": 100}})");
  auto all_reports = [&] {
    std::string out;
    out += cli::cmd_verify_derivatives(cfg).to_json(false).dump(2);
    out += cli::cmd_verify_ricci(cfg, cli::RicciScope::Catalogue).to_json(false).dump(2);
    out += cli::cmd_verify_ricci(cfg, cli::RicciScope::Mixed).to_json(false).dump(2);
    out += cli::cmd_rank_rho(cfg).to_json(false).dump(2);
    out += cli::cmd_cosmology(cfg).to_json(false).dump(2);
    return out;
  };
  const char* prev = std::getenv("NSAC_WORKERS");
  std::string saved = prev ? prev : "";
  setenv("NSAC_WORKERS", "1", 1);
  const std::string a = all_reports();
  setenv("NSAC_WORKERS", "4", 1);
  const std::string b = all_reports();
  if (prev) {
    setenv("NSAC_WORKERS", saved.c_str(), 1);
  } else {
    unsetenv("NSAC_WORKERS");
  }
  if (a != b) o.fail("reports differ between runs");
  if (o.pass) o.detail = std::to_string(a.size()) + " bytes identical across two runs";
  return o;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "derivative relations, 20 pairs at N=2,3,4", 10, relations},
      {2, "derivative kind ranks", 0, kind_ranks},
      {3, "double derivatives vs expanded forms, 20 instances at N=3", 60, double_derivatives},
      {4, "catalogued identities, 20 instances at N=3", 120, catalogue},
      {5, "81-combination sweep at N=3,4 with span rank 17", 600, sweep},
      {6, "mixed family, 5 weight matrices", 0, mixed},
      {7, "expanded identity and bracket objects, 10 instances", 0, expanded},
      {8, "curvature family ranks", 0, rho_ranks},
      {9, "cosmological metric", 30, cosmology},
      {10, "determinism of reports", 0, determinism},
  };
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: nsac_acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria().size())) {
    std::cerr << "criterion must be 1.." << criteria().size() << "\n";
    return 2;
  }

  int failures = 0;
  for (const auto& c : criteria()) {
    if (only && c.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && elapsed >= c.time_limit)
      o.fail("runtime " + fmt_seconds(elapsed) + " exceeds " + fmt_seconds(c.time_limit));
    std::cout << "criterion " << c.number << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.title << "  ("
              << o.detail << ", " << fmt_seconds(elapsed) << ")\n";
    for (const auto& n : o.notes) std::cout << "    " << n << "\n";
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
