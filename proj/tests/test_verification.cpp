#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "cbgen/csv.hpp"
#include "cbgen/report.hpp"
#include "cbgen/stats.hpp"
#include "cbgen/suites.hpp"

using namespace cbgen;

namespace {

MCEstimate estimate(double mean, double se) {
  MCEstimate e;
  e.n = 100;
  e.mean = mean;
  e.stderr_ = se;
  e.variance = se * se * 100;
  return e;
}

}  // namespace

TEST_SUITE("verification") {

TEST_CASE("z comparison examples") {
  auto z = z_compare(estimate(1.002, 0.001), 1.0);
  CHECK(z.zscore == doctest::Approx(2.0));
  CHECK(z.passed);
  z = z_compare(estimate(1.01, 0.001), 1.0);
  CHECK(z.zscore == doctest::Approx(10.0));
  CHECK(!z.passed);
  CHECK(z_compare(estimate(1.0, 0.0), 1.0).passed);
  CHECK_THROWS_AS(z_compare(estimate(1.1, 0.0), 1.0), DegenerateError);
}

TEST_CASE("summaries") {
  const std::vector<double> v{1, 2, 3, 4};
  const MCEstimate e = summarize(v);
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.variance == doctest::Approx(5.0 / 3.0));
  CHECK(e.stderr_ == doctest::Approx(std::sqrt(5.0 / 12.0)));
  std::vector<double> series(100);
  for (std::size_t i = 0; i < series.size(); ++i) series[i] = static_cast<double>(i / 10);
  const MCEstimate b = batch_means(series, 10);
  CHECK(b.n == 10);
  CHECK(b.mean == doctest::Approx(4.5));
}

TEST_CASE("Kolmogorov-Smirnov") {
  const std::vector<double> a{1, 2, 2, 3, 5};
  const KsResult same = ks_two_sample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == 1.0);
  const KsResult apart = ks_two_sample({1, 2, 3}, {10, 11, 12});
  CHECK(apart.statistic == 1.0);
  CHECK(kolmogorov_survival(kolmogorov_quantile(1e-3)) == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(kolmogorov_quantile(1e-3) == doctest::Approx(1.9495).epsilon(1e-4));
  RandomStream r1(1, 0), r2(2, 0);
  std::vector<double> x(5000), y(5000);
  for (auto& v : x) v = r1.exponential();
  for (auto& v : y) v = r2.exponential();
  CHECK(ks_two_sample(x, y).p_value > 1e-3);
  for (auto& v : y) v *= 1.2;
  CHECK(ks_two_sample(x, y).p_value < 1e-3);
}

TEST_CASE("report serialization round trips") {
  SuiteReport rep;
  rep.suite = "demo";
  rep.seed = 99;
  rep.params = ModelParams(1.5, 0.25);
  rep.checks.push_back(make_z_check("b.z", estimate(0.1 + 1e-17, 0.3), 1.0 / 3.0));
  rep.checks.push_back(make_ks_check("a.ks", ks_two_sample({1, 2, 3}, {1, 2, 4})));
  rep.checks.push_back(make_abs_check("c.abs", 1.6363992, 1.6449341, 1e-4));
  rep.checks.push_back(make_rel_check("d.rel", estimate(1.04, 0.01), 1.0, 0.05));
  rep.checks[0].runtime_ms = 12;
  finalize(rep);
  CHECK(rep.checks.front().name == "a.ks");
  CHECK(!rep.overall_pass);
  const SuiteReport back = report_from_json(to_json(rep));
  CHECK(to_json(back) == to_json(rep));
  REQUIRE(back.checks.size() == rep.checks.size());
  for (std::size_t i = 0; i < rep.checks.size(); ++i) {
    const auto& x = rep.checks[i];
    const auto& y = back.checks[i];
    CHECK(x.name == y.name);
    CHECK(x.kind == y.kind);
    CHECK(x.analytic == y.analytic);
    CHECK(x.estimate.mean == y.estimate.mean);
    CHECK(x.estimate.stderr_ == y.estimate.stderr_);
    CHECK(x.zscore == y.zscore);
    CHECK(x.passed == y.passed);
    CHECK(x.runtime_ms == y.runtime_ms);
    CHECK(x.p_value == y.p_value);
    CHECK(x.tolerance == y.tolerance);
  }
  CHECK(back.params.beta() == 1.5);
  CHECK(back.seed == 99);
  CHECK(rep.find("d.rel")->passed);
  CHECK(rep.find("missing") == nullptr);
}

TEST_CASE("lineage CSV round trip") {
  std::vector<LineageSample> s(2);
  s[0].z0 = 0.5;
  s[0].epsilon = 0.01;
  s[0].lifetimes = {1.25, 0.5};
  s[1].z0 = 2.0;
  s[1].epsilon = 0.01;
  const std::string text = lineage_csv(s);
  CHECK(text.rfind("sample_id,z0,n_lifetimes,lifetimes\n", 0) == 0);
  const auto back = parse_lineage_csv(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].lifetimes == s[0].lifetimes);
  CHECK(back[1].lifetimes.empty());
  CHECK(format_number(-3.0, 15) == "-3");
  CHECK(format_number(1.0 / 3.0, 15) == "0.333333333333333");
}

TEST_CASE("suite registry") {
  CHECK(suite_names().size() == 6);
  SuiteOptions o;
  CHECK_THROWS_AS(run_suite("bogus", o), ConfigError);
  o.particles = 50;
  CHECK_THROWS_AS(run_suite("particle", o), ConfigError);
  const SuiteReport a = run_suite("kernel", o);
  o.seed = 12345;
  const SuiteReport b = run_suite("kernel", o);
  REQUIRE(a.checks.size() == b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) CHECK(a.checks[i].estimate.mean == b.checks[i].estimate.mean);
}

}  // TEST_SUITE
