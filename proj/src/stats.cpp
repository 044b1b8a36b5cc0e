#include "cbgen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "cbgen/params.hpp"

namespace cbgen {

MCEstimate summarize(std::span<const double> values) {
  MCEstimate est;
  est.n = static_cast<std::int64_t>(values.size());
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(est.n);
  if (est.n > 1) {
    double ss = 0.0;
    double drift = 0.0;
    for (double v : values) {
      ss += (v - est.mean) * (v - est.mean);
      drift += v - est.mean;
    }
    const double nn = static_cast<double>(est.n);
    est.variance = (ss - drift * drift / nn) / (nn - 1.0);
  }
  est.stderr_ = std::sqrt(est.variance / static_cast<double>(est.n));
  return est;
}

MCEstimate batch_means(std::span<const double> series, std::size_t batches) {
  if (batches < 2 || series.size() < 2 * batches)
    throw ConfigError("batch_means: series too short for the requested batches");
  const std::size_t len = series.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) sum += series[i];
    means[b] = sum / static_cast<double>(len);
  }
  return summarize(means);
}

unsigned worker_count() {
  if (const char* env = std::getenv("CBGEN_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::vector<double>> parallel_map_multi(
    std::int64_t n, std::size_t outputs, const RandomStream& base,
    const std::function<void(std::int64_t, RandomStream&, std::span<double>)>& f) {
  std::vector<std::vector<double>> out(outputs, std::vector<double>(static_cast<std::size_t>(n)));
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(n, 1)));
  auto run = [&](unsigned w) {
    std::vector<double> row(outputs);
    for (std::int64_t i = w; i < n; i += workers) {
      RandomStream rng = base.substream(static_cast<std::uint64_t>(i));
      f(i, rng, row);
      for (std::size_t k = 0; k < outputs; ++k) out[k][static_cast<std::size_t>(i)] = row[k];
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  return out;
}

std::vector<double> parallel_map(std::int64_t n, const RandomStream& base,
                                 const std::function<double(std::int64_t, RandomStream&)>& f) {
  auto out = parallel_map_multi(n, 1, base, [&](std::int64_t i, RandomStream& rng,
                                                std::span<double> row) { row[0] = f(i, rng); });
  return std::move(out[0]);
}

MCEstimate mc_estimate(const std::function<double(RandomStream&)>& sampler, std::int64_t n,
                       const RandomStream& base) {
  if (n < 1) throw ConfigError("mc_estimate: n must be positive");
  auto values = parallel_map(n, base, [&](std::int64_t, RandomStream& rng) { return sampler(rng); });
  return summarize(values);
}

ZComparison z_compare(const MCEstimate& est, double analytic, double threshold) {
  const double gap = est.mean - analytic;
  if (std::abs(gap) <= 1e-12) return {0.0, true};
  if (est.stderr_ <= 0.0)
    throw DegenerateError("z_compare: zero standard error with mean " + std::to_string(est.mean) +
                          " against " + std::to_string(analytic));
  const double z = gap / est.stderr_;
  return {z, std::abs(z) <= threshold};
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kolmogorov_quantile(double p) {
  double lo = 0.2, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_survival(mid) > p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  KsResult r;
  r.statistic = d;
  const double ne = std::sqrt(n * m / (n + m));
  r.scaled = (ne + 0.12 + 0.11 / ne) * d;
  r.p_value = kolmogorov_survival(r.scaled);
  return r;
}

}  // namespace cbgen
