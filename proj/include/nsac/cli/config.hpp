#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsac/grspace.hpp"
#include "nsac/polynomial.hpp"
#include "nsac/rational.hpp"

namespace nsac::cli {

using Json = nlohmann::ordered_json;

// Invalid or unreadable configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CosmologyConfig {
  CosmologyMetric metric;
  Rational t0{0};
  Rational t1{1};
  std::size_t steps = 1000;
};

using WeightMatrix = std::array<std::array<Rational, 3>, 5>;

struct RunConfig {
  std::size_t dimension = 3;
  std::uint64_t seed = 1;
  unsigned degree = 2;
  std::size_t instances = 3;
  std::optional<WeightMatrix> mix_weights;
  std::optional<CosmologyConfig> cosmology;
  std::string output;

  Json echo() const;
};

inline constexpr unsigned kMaxConfigDegree = 8;

namespace detail {

inline std::string poly_field_name(std::size_t k) {
  static const char* names[] = {"s1", "s2", "s3", "s4", "n"};
  return names[k];
}

inline Rational rational_field(const Json& v, const std::string& field) {
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
  } catch (const std::exception& e) {
    throw ConfigError("field '" + field + "': " + e.what());
  }
  throw ConfigError("field '" + field + "': expected a \"p/q\" string or an integer");
}

inline std::uint64_t unsigned_field(const Json& v, const std::string& field) {
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer()) throw ConfigError("field '" + field + "': must be positive");
    throw ConfigError("field '" + field + "': expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");

  static const std::vector<std::string> known{"dimension", "seed",      "degree", "instances",
                                              "mix_weights", "cosmology", "output"};
  for (const auto& [key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown field '" + key + "'");

  RunConfig cfg;
  if (doc.contains("dimension")) {
    auto d = detail::unsigned_field(doc["dimension"], "dimension");
    if (d < 2 || d > kMaxDimension)
      throw ConfigError("field 'dimension': must be in 2.." + std::to_string(kMaxDimension));
    cfg.dimension = d;
  }
  if (doc.contains("seed")) cfg.seed = detail::unsigned_field(doc["seed"], "seed");
  if (doc.contains("degree")) {
    auto d = detail::unsigned_field(doc["degree"], "degree");
    if (d < 1 || d > kMaxConfigDegree)
      throw ConfigError("field 'degree': must be in 1.." + std::to_string(kMaxConfigDegree));
    cfg.degree = static_cast<unsigned>(d);
  }
  if (doc.contains("instances")) {
    auto n = detail::unsigned_field(doc["instances"], "instances");
    if (n == 0) throw ConfigError("field 'instances': must be positive");
    cfg.instances = n;
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("field 'output': expected a path string");
    cfg.output = doc["output"].get<std::string>();
  }
  if (doc.contains("mix_weights")) {
    const Json& w = doc["mix_weights"];
    if (!w.is_array() || w.size() != 5) throw ConfigError("field 'mix_weights': expected 5 rows of 3 weights");
    WeightMatrix m;
    for (std::size_t k = 0; k < 5; ++k) {
      if (!w[k].is_array() || w[k].size() != 3)
        throw ConfigError("field 'mix_weights[" + std::to_string(k) + "]': expected 3 weights");
      for (std::size_t l = 0; l < 3; ++l)
        m[k][l] = detail::rational_field(w[k][l], "mix_weights[" + std::to_string(k) + "][" + std::to_string(l) + "]");
      if (m[k][0] + m[k][1] + m[k][2] != Rational(1))
        throw ConfigError("field 'mix_weights[" + std::to_string(k) + "]': weights must sum to 1");
    }
    cfg.mix_weights = m;
  }
  if (doc.contains("cosmology")) {
    const Json& c = doc["cosmology"];
    if (!c.is_object()) throw ConfigError("field 'cosmology': expected an object");
    static const std::vector<std::string> ckeys{"polynomials", "vprime_minus_w", "t0", "t1", "steps"};
    for (const auto& [key, _] : c.items())
      if (std::find(ckeys.begin(), ckeys.end(), key) == ckeys.end())
        throw ConfigError("unknown field 'cosmology." + key + "'");
    if (!c.contains("polynomials") || !c["polynomials"].is_array() || c["polynomials"].size() != 5)
      throw ConfigError("field 'cosmology.polynomials': expected exactly five coefficient lists (s1, s2, s3, s4, n)");
    CosmologyConfig cc;
    for (std::size_t k = 0; k < 5; ++k) {
      const Json& list = c["polynomials"][k];
      const std::string name = "cosmology.polynomials[" + std::to_string(k) + "] (" + detail::poly_field_name(k) + ")";
      if (!list.is_array()) throw ConfigError("field '" + name + "': expected a coefficient list");
      std::vector<Rational> coeffs;
      for (std::size_t i = 0; i < list.size(); ++i)
        coeffs.push_back(detail::rational_field(list[i], name + "[" + std::to_string(i) + "]"));
      if (k < 4) {
        cc.metric.s[k] = UPoly(std::move(coeffs));
      } else {
        cc.metric.n = UPoly(std::move(coeffs));
      }
    }
    if (c.contains("vprime_minus_w"))
      cc.metric.vprime_minus_w = detail::rational_field(c["vprime_minus_w"], "cosmology.vprime_minus_w");
    if (c.contains("t0")) cc.t0 = detail::rational_field(c["t0"], "cosmology.t0");
    if (c.contains("t1")) cc.t1 = detail::rational_field(c["t1"], "cosmology.t1");
    if (!(cc.t0 < cc.t1)) throw ConfigError("field 'cosmology.t1': must exceed t0");
    if (c.contains("steps")) {
      cc.steps = detail::unsigned_field(c["steps"], "cosmology.steps");
      if (cc.steps == 0) throw ConfigError("field 'cosmology.steps': must be positive");
    }
    try {
      cc.metric.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field 'cosmology.polynomials': ") + e.what());
    }
    cfg.cosmology = std::move(cc);
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline Json RunConfig::echo() const {
  Json j;
  j["dimension"] = dimension;
  j["seed"] = seed;
  j["degree"] = degree;
  j["instances"] = instances;
  if (mix_weights) {
    Json rows = Json::array();
    for (const auto& row : *mix_weights) {
      Json r = Json::array();
      for (const auto& v : row) r.push_back(v.to_string());
      rows.push_back(r);
    }
    j["mix_weights"] = rows;
  }
  if (cosmology) {
    Json c;
    Json polys = Json::array();
    auto coeffs = [](const UPoly& p) {
      Json a = Json::array();
      for (const auto& v : p.coeffs()) a.push_back(v.to_string());
      return a;
    };
    for (const auto& s : cosmology->metric.s) polys.push_back(coeffs(s));
    polys.push_back(coeffs(cosmology->metric.n));
    c["polynomials"] = polys;
    c["vprime_minus_w"] = cosmology->metric.vprime_minus_w.to_string();
    c["t0"] = cosmology->t0.to_string();
    c["t1"] = cosmology->t1.to_string();
    c["steps"] = cosmology->steps;
    j["cosmology"] = c;
  }
  return j;
}

}  // namespace nsac::cli
