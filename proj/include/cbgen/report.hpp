#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbgen/params.hpp"
#include "cbgen/stats.hpp"

namespace cbgen {

// How a check was decided:
//   z    |estimate - analytic| / stderr against threshold
//   ks   Stephens-scaled KS statistic against the Kolmogorov quantile of the p floor
//   abs  |estimate - analytic| / tolerance against threshold 1
//   rel  |estimate - analytic| / (tolerance |analytic|) against threshold 1
// In every case passed == (|zscore| <= threshold).
enum class CheckKind { kZ, kKs, kAbs, kRel };

struct CheckResult {
  std::string name;
  CheckKind kind = CheckKind::kZ;
  double analytic = 0.0;
  MCEstimate estimate;
  double zscore = 0.0;
  double threshold = 4.0;
  bool passed = false;
  std::int64_t runtime_ms = 0;
  std::optional<double> p_value;
  std::optional<double> tolerance;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  ModelParams params;
  std::vector<CheckResult> checks;  // sorted by name
  bool overall_pass = false;

  const CheckResult* find(const std::string& name) const;
};

CheckResult make_z_check(std::string name, const MCEstimate& est, double analytic,
                         double threshold = 4.0);
CheckResult make_ks_check(std::string name, const KsResult& ks, double p_floor = 1e-3);
// Deterministic or fixed-tolerance comparison.
CheckResult make_abs_check(std::string name, double value, double analytic, double tol,
                           const MCEstimate* est = nullptr);
CheckResult make_rel_check(std::string name, const MCEstimate& est, double analytic,
                           double rel_tol);

// Sorts checks and sets overall_pass.
void finalize(SuiteReport& report);

std::string to_json(const SuiteReport& report);
SuiteReport report_from_json(const std::string& text);

const char* kind_name(CheckKind kind);

}  // namespace cbgen
