// Acceptance battery: one line per criterion, exit status 1 if any is red.
// Usage: cbgen_acceptance [seed]

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "cbgen/csv.hpp"
#include "cbgen/kernel.hpp"
#include "cbgen/numeric.hpp"
#include "cbgen/suites.hpp"

using namespace cbgen;

namespace {

struct Criterion {
  std::string id;
  std::string title;
  std::vector<std::string> checks;  // exact names, or a prefix ending in '*'
  // Stated values at beta = theta = 1: {computed, stated}, relative 1e-3.
  std::vector<std::pair<double, double>> stated;
};

bool matches(const std::string& pattern, const std::string& name) {
  if (!pattern.empty() && pattern.back() == '*')
    return name.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
  return pattern == name;
}

}  // namespace

int main(int argc, char** argv) {
  SuiteOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  const ModelParams& p = opts.params;
  using namespace kernel;
  const double e = std::exp(1.0);
  const double ln2 = std::log(2.0);

  std::map<std::string, SuiteReport> reports;
  for (const auto& name : suite_names()) {
    reports[name] = run_suite(name, opts);
    std::cerr << "suite " << name << " done\n";
  }

  const std::vector<Criterion> criteria{
      {"1", "dilogarithm at one", {"kernel.dilog.at_one"}, {}},
      {"2", "phi at integers", {"kernel.phi.harmonic"}, {{phi(2.0), -3.0}}},
      {"3", "semigroup and backward equation", {"kernel.semigroup", "kernel.backward_ode"}, {}},
      {"4", "graft identity", {"kernel.graft.tmrca", "kernel.graft.pop_laplace"}, {}},
      {"5", "two-time boundary and s = 0 reduction", {"kernel.two_time.boundary", "kernel.two_time.s_zero"}, {}},
      {"6a", "covariance near zero lag within 1e-4 of the variance", {"kernel.w_cov.small_s"}, {}},
      {"6b", "covariance strictly decreasing", {"kernel.w_cov.monotone"}, {}},
      {"6c", "covariance pinned at s = 0.5", {"kernel.w_cov.pinned"}, {}},
      {"7", "population moments",
       {"single.z0.mean", "single.z0.second_moment", "single.z0.laplace_1"},
       {{pop_mean(p), 1.0}, {pop_second_moment(p), 1.5}, {pop_laplace(p, 1.0), 4.0 / 9.0}}},
      {"8", "ancestor count laws at r = 0.5",
       {"single.ancestors.mean_0.5", "single.ancestors.second_moment_0.5", "single.ancestors.laplace_1_0.5"},
       {{ancestors_mean(p, 0.5), 1.16395},
        {ancestors_second_moment(p, 0.5), 2 * (e + 2) / ((e - 1) * (e - 1))},
        {ancestors_laplace(p, 1.0, 0.5), 1.0 / ((1 + 1 / e) * (1 + 1 / e))}}},
      {"9", "TMRCA law", {"single.tmrca.cdf_0.5", "single.tmrca.mean"},
       {{tmrca_cdf(p, 0.5), 0.39958}, {tmrca_mean(p), 0.75}}},
      {"10", "compensated length moments",
       {"single.compensated.increment_0.1_1", "single.compensated.mean"},
       {{compensated_increment_second_moment(p, 0.1, 1.0), 0.71131}}},
      {"11", "compensated total length W0",
       {"single.w0.mean", "single.w0.second_moment", "single.w0.laplace_0.25",
        "kernel.w_laplace.half_closed_form"},
       {{w_second_moment(p), std::numbers::pi * std::numbers::pi / 6}, {w_laplace(p, 0.5), 2.08137},
        {w_laplace(p, 0.25), 1.0 / ((1 + phi(0.25)) * (1 + phi(0.25)))}}},
      {"12", "excursion slice laws", {"slice.laplace", "slice.mean", "slice.restricted_mean"},
       {{slice_laplace(p, ln2, 0.5, 0.5), 0.18084},
        {slice_mean(p, 0.5, 0.5), 0.42820},
        {restricted_mean(p, 0.5, 0.5, 0.5), 0.25921}}},
      {"13", "joint transform, forward and backward",
       {"two_time.joint_laplace.forward", "two_time.joint_laplace.backward", "two_time.joint_laplace.agreement"},
       {{joint_forward_laplace(p, ln2, ln2, 0.5, 1.0), 0.56524}}},
      {"14", "cross moment and conditional means", {"two_time.cross_moment", "two_time.cond_mean.*"},
       {{cross_moment(p, 0.5, 1.0), 0.85955}}},
      {"15", "birth and death path marginals", {"paths.*"}, {}},
      {"16", "fluctuation limit", {"fluctuation.variance_limit", "fluctuation.ks_limit"}, {}},
      {"17", "particle stationary mean and autocovariance", {"particle.mean", "particle.autocov_0.5"},
       {{pop_autocovariance_raw(p, 0.5), 1.18394}}},
      {"18", "particle cross-time moment and length covariance",
       {"particle.two_time_r1_s0.3_q0.8", "particle.length_cov_0.5"},
       {{two_time_cross_moment(p, 1.0, 0.3, 0.8), 0.3736}}},
  };

  int red = 0;
  for (const auto& c : criteria) {
    bool ok = true;
    std::string detail;
    int found = 0;
    for (const auto& pattern : c.checks)
      for (const auto& [suite, rep] : reports)
        for (const auto& chk : rep.checks) {
          if (!matches(pattern, chk.name)) continue;
          ++found;
          if (!chk.passed) {
            ok = false;
            detail += " " + chk.name + " (analytic " + format_number(chk.analytic, 10) + ", estimate " +
                      format_number(chk.estimate.mean, 10) + ", score " + format_number(chk.zscore, 4) + ")";
          }
        }
    if (found < static_cast<int>(c.checks.size())) {
      ok = false;
      detail += " missing checks";
    }
    for (const auto& [value, stated] : c.stated)
      if (std::abs(value - stated) > 1e-3 * std::abs(stated)) {
        ok = false;
        detail += " computed " + format_number(value, 10) + " vs stated " + format_number(stated, 10);
      }
    // Coarse pre-estimate 0.253 +/- 0.005.
    if (c.id == "6c" && std::abs(w_covariance(p, 0.5) - 0.253) > 0.005) {
      ok = false;
      detail += " outside the coarse pre-estimate";
    }
    if (!ok) ++red;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " [" << found
              << " checks]" << detail << "\n";
  }
  std::cout << (red == 0 ? "all criteria pass" : std::to_string(red) + " criteria red") << "\n";
  return red == 0 ? 0 : 1;
}
