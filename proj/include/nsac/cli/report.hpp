#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsac/tensor.hpp"

namespace nsac::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "nsac";
inline constexpr const char* kToolVersion = "1.0.0";

// Largest residual over a batch of exact computations.
class ResidualTracker {
 public:
  void add(const TensorField& r) {
    if (!r.is_zero()) {
      exact_zero_ = false;
      max_abs_ = std::max(max_abs_, max_abs_coefficient(r));
    }
  }
  void add(const Tensor<Rational>& r) {
    for (std::size_t f = 0; f < r.size(); ++f)
      if (!r[f].is_zero()) {
        exact_zero_ = false;
        max_abs_ = std::max(max_abs_, std::abs(r[f].to_double()));
      }
  }
  void merge(const ResidualTracker& o) {
    exact_zero_ = exact_zero_ && o.exact_zero_;
    max_abs_ = std::max(max_abs_, o.max_abs_);
  }
  bool exact_zero() const { return exact_zero_; }
  double max_abs() const { return max_abs_; }

 private:
  bool exact_zero_ = true;
  double max_abs_ = 0;
};

struct Check {
  std::string id;   // stable check id, e.g. "eq:ric12-11"
  std::string tag;  // equation or statement label the check traces to
  std::size_t instances = 0;
  bool pass = false;
  // Set for checks whose outcome is a residual; absent for rank or table checks.
  std::optional<ResidualTracker> residual;
  std::string message;
  Json detail = Json::object();
  double elapsed = 0;

  static Check from_residual(std::string id, std::string tag, std::size_t instances, const ResidualTracker& r) {
    Check c;
    c.id = std::move(id);
    c.tag = std::move(tag);
    c.instances = instances;
    c.residual = r;
    c.pass = r.exact_zero();
    return c;
  }
  static Check from_rank(std::string id, std::string tag, std::size_t expected, std::size_t actual) {
    Check c;
    c.id = std::move(id);
    c.tag = std::move(tag);
    c.pass = expected == actual;
    c.detail["expected_rank"] = expected;
    c.detail["rank"] = actual;
    return c;
  }

  Json to_json(bool timing) const {
    Json j;
    j["id"] = id;
    j["tag"] = tag;
    j["instances"] = instances;
    if (residual) {
      if (residual->exact_zero()) {
        j["residual"] = "exact-zero";
      } else {
        j["residual"] = residual->max_abs();
      }
    }
    j["status"] = pass ? "pass" : "fail";
    if (!message.empty()) j["message"] = message;
    if (!detail.empty()) j["detail"] = detail;
    if (timing) j["elapsed_s"] = elapsed;
    return j;
  }
};

// Elapsed wall time is nondeterministic, so it is only reported on request.
inline bool timing_requested() {
  const char* v = std::getenv("NSAC_REPORT_TIMING");
  return v && std::string(v) == "1";
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Report {
  std::string command;
  Json config = Json::object();
  std::vector<Check> checks;
  // Known discrepancies with published forms; informational, never counted.
  std::vector<Check> errata;

  std::size_t passed() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; }));
  }
  std::size_t failed() const { return checks.size() - passed(); }

  void sort() {
    auto by_id = [](const Check& a, const Check& b) { return a.id < b.id; };
    std::stable_sort(checks.begin(), checks.end(), by_id);
    std::stable_sort(errata.begin(), errata.end(), by_id);
  }

  Json to_json(bool timing) const {
    Json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["command"] = command;
    j["config"] = config;
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back(c.to_json(timing));
    j["checks"] = cs;
    if (!errata.empty()) {
      Json es = Json::array();
      for (const auto& c : errata) es.push_back(c.to_json(timing));
      j["errata"] = es;
    }
    j["summary"] = {{"pass", passed()}, {"fail", failed()}};
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << kToolName << " " << command << "\n";
    auto line = [&os](const Check& c, const char* status) {
      os << "  " << status << "  " << c.id;
      if (c.instances) os << "  [" << c.instances << " instance" << (c.instances == 1 ? "" : "s") << "]";
      if (c.residual) {
        if (c.residual->exact_zero()) {
          os << "  exact-zero";
        } else {
          os << "  max|residual| = " << c.residual->max_abs();
        }
      }
      if (c.detail.contains("rank"))
        os << "  rank " << c.detail["rank"].get<std::size_t>() << " (expected "
           << c.detail["expected_rank"].get<std::size_t>() << ")";
      if (!c.message.empty()) os << "  " << c.message;
      os << "\n";
    };
    for (const auto& c : checks) line(c, c.pass ? "PASS" : "FAIL");
    if (!errata.empty()) {
      os << "published-form discrepancies (informational):\n";
      for (const auto& c : errata) line(c, c.pass ? "HOLDS" : "DIFFERS");
    }
    os << "summary: " << passed() << " pass, " << failed() << " fail\n";
    return os.str();
  }
};

}  // namespace nsac::cli
