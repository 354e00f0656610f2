#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rcbm {

// Streaming mean/variance with compensated sums.  merge() is associative, so
// per-replicate accumulators can be combined in any order (results agree to
// ~1 ulp independent of worker count).
class MeanVar {
 public:
  void add(double x);
  void merge(const MeanVar& other);

  std::size_t count() const { return n_; }
  double mean() const;
  double variance() const;  // unbiased (n-1 denominator)
  double stderr_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double mean_c_ = 0.0;  // Kahan carry for the mean update
  double m2_ = 0.0;
  double m2_c_ = 0.0;
};

// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
// Sorts a copy of the sample.
double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf);

// Two-sample KS statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

// 95% critical value 1.36/sqrt(n) for the one-sample statistic.
double ks_critical_95(std::size_t n);

// 95% critical value 1.36*sqrt((n+m)/(n*m)) for the two-sample statistic.
double ks_critical_two_sample_95(std::size_t n, std::size_t m);

} // namespace rcbm
