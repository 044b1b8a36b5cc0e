#include "cbgen/report.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace cbgen {

using nlohmann::json;

const char* kind_name(CheckKind kind) {
  switch (kind) {
    case CheckKind::kZ: return "z";
    case CheckKind::kKs: return "ks";
    case CheckKind::kAbs: return "abs";
    case CheckKind::kRel: return "rel";
  }
  return "z";
}

namespace {

CheckKind kind_from(const std::string& s) {
  if (s == "z") return CheckKind::kZ;
  if (s == "ks") return CheckKind::kKs;
  if (s == "abs") return CheckKind::kAbs;
  if (s == "rel") return CheckKind::kRel;
  throw ConfigError("report: unknown check kind '" + s + "'");
}

// JSON has no infinities; large finite stand-ins keep reports parseable.
double finite(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
  return v;
}

}  // namespace

const CheckResult* SuiteReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

CheckResult make_z_check(std::string name, const MCEstimate& est, double analytic,
                         double threshold) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = CheckKind::kZ;
  r.analytic = analytic;
  r.estimate = est;
  r.threshold = threshold;
  const ZComparison z = z_compare(est, analytic, threshold);
  r.zscore = z.zscore;
  r.passed = z.passed;
  return r;
}

CheckResult make_ks_check(std::string name, const KsResult& ks, double p_floor) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = CheckKind::kKs;
  r.analytic = 0.0;
  r.estimate.n = 1;
  r.estimate.mean = ks.statistic;
  r.zscore = ks.scaled;
  r.threshold = kolmogorov_quantile(p_floor);
  r.p_value = ks.p_value;
  r.passed = ks.scaled <= r.threshold;
  return r;
}

CheckResult make_abs_check(std::string name, double value, double analytic, double tol,
                           const MCEstimate* est) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = CheckKind::kAbs;
  r.analytic = analytic;
  if (est) {
    r.estimate = *est;
  } else {
    r.estimate.n = 1;
    r.estimate.mean = value;
  }
  r.tolerance = tol;
  r.threshold = 1.0;
  r.zscore = (value - analytic) / tol;
  r.passed = std::abs(r.zscore) <= 1.0;
  return r;
}

CheckResult make_rel_check(std::string name, const MCEstimate& est, double analytic,
                           double rel_tol) {
  CheckResult r;
  r.name = std::move(name);
  r.kind = CheckKind::kRel;
  r.analytic = analytic;
  r.estimate = est;
  r.tolerance = rel_tol;
  r.threshold = 1.0;
  r.zscore = (est.mean - analytic) / (rel_tol * std::abs(analytic));
  r.passed = std::abs(r.zscore) <= 1.0;
  return r;
}

void finalize(SuiteReport& report) {
  std::sort(report.checks.begin(), report.checks.end(),
            [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
  report.overall_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                    [](const CheckResult& c) { return c.passed; });
}

std::string to_json(const SuiteReport& report) {
  json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["params"] = {{"beta", report.params.beta()}, {"theta", report.params.theta()}};
  j["overall_pass"] = report.overall_pass;
  json checks = json::array();
  for (const auto& c : report.checks) {
    json e;
    e["name"] = c.name;
    e["kind"] = kind_name(c.kind);
    e["analytic"] = finite(c.analytic);
    e["estimate"] = {{"n", c.estimate.n},
                     {"mean", finite(c.estimate.mean)},
                     {"variance", finite(c.estimate.variance)},
                     {"stderr", finite(c.estimate.stderr_)}};
    e["zscore"] = finite(c.zscore);
    e["threshold"] = finite(c.threshold);
    e["passed"] = c.passed;
    e["runtime_ms"] = c.runtime_ms;
    if (c.p_value) e["p_value"] = *c.p_value;
    if (c.tolerance) e["tolerance"] = *c.tolerance;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j.dump(2);
}

SuiteReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    SuiteReport r;
    r.suite = j.at("suite").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.params = ModelParams(j.at("params").at("beta").get<double>(),
                           j.at("params").at("theta").get<double>());
    r.overall_pass = j.at("overall_pass").get<bool>();
    for (const auto& e : j.at("checks")) {
      CheckResult c;
      c.name = e.at("name").get<std::string>();
      c.kind = kind_from(e.at("kind").get<std::string>());
      c.analytic = e.at("analytic").get<double>();
      const auto& est = e.at("estimate");
      c.estimate.n = est.at("n").get<std::int64_t>();
      c.estimate.mean = est.at("mean").get<double>();
      c.estimate.variance = est.at("variance").get<double>();
      c.estimate.stderr_ = est.at("stderr").get<double>();
      c.zscore = e.at("zscore").get<double>();
      c.threshold = e.at("threshold").get<double>();
      c.passed = e.at("passed").get<bool>();
      c.runtime_ms = e.at("runtime_ms").get<std::int64_t>();
      if (e.contains("p_value")) c.p_value = e.at("p_value").get<double>();
      if (e.contains("tolerance")) c.tolerance = e.at("tolerance").get<double>();
      r.checks.push_back(std::move(c));
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: missing or malformed field: ") + e.what());
  }
}

}  // namespace cbgen
