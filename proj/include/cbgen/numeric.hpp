#pragma once

#include <functional>

namespace cbgen::numeric {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

struct QuadOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
  int max_intervals = 2000;
};

// Globally adaptive Gauss-Kronrod (7/15) on a finite interval. Throws
// ResourceError if the tolerance is not met within max_intervals.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opts = {});

// Li_2(x) = sum_k x^k / k^2 for x <= 1.
double dilogarithm(double x);

}  // namespace cbgen::numeric
