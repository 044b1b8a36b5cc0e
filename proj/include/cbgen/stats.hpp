#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cbgen/random.hpp"

namespace cbgen {

struct MCEstimate {
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double stderr_ = 0.0;   // sqrt(variance / n)
};

struct ZComparison {
  double zscore = 0.0;
  bool passed = false;
};

struct KsResult {
  double statistic = 0.0;  // sup |F_x - F_y|
  double scaled = 0.0;     // sqrt(n m / (n + m)) * statistic, Stephens-corrected
  double p_value = 1.0;
};

MCEstimate summarize(std::span<const double> values);
// Batch-means summary of a correlated series: n is the number of batches.
MCEstimate batch_means(std::span<const double> series, std::size_t batches);

// Worker count from CBGEN_THREADS, else hardware concurrency, at least 1.
unsigned worker_count();

// out[i] = f(i, rng_i) with rng_i = base.substream(i). The result does not
// depend on the number of workers.
std::vector<double> parallel_map(std::int64_t n, const RandomStream& base,
                                 const std::function<double(std::int64_t, RandomStream&)>& f);
// Same for several outputs per replicate: out[k][i].
std::vector<std::vector<double>> parallel_map_multi(
    std::int64_t n, std::size_t outputs, const RandomStream& base,
    const std::function<void(std::int64_t, RandomStream&, std::span<double>)>& f);

MCEstimate mc_estimate(const std::function<double(RandomStream&)>& sampler, std::int64_t n,
                       const RandomStream& base);

// Passes when |mean - analytic| <= threshold * stderr or the gap is below 1e-12.
// Throws DegenerateError when stderr is 0 and the gap is not negligible.
ZComparison z_compare(const MCEstimate& est, double analytic, double threshold = 4.0);

// Two-sample Kolmogorov-Smirnov test. Ties are evaluated at distinct values,
// so for discrete samples the p-value is conservative.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);
// Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);
// lambda with kolmogorov_survival(lambda) = p.
double kolmogorov_quantile(double p);

}  // namespace cbgen
