#include "rcbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcbm {

namespace {
// y added to (sum, carry) via Kahan update.
inline void kahan_add(double& sum, double& carry, double y) {
  const double t = y - carry;
  const double s = sum + t;
  carry = (s - sum) - t;
  sum = s;
}
} // namespace

void MeanVar::add(double x) {
  ++n_;
  const double delta = x - mean_;
  kahan_add(mean_, mean_c_, delta / static_cast<double>(n_));
  kahan_add(m2_, m2_c_, delta * (x - mean_));
}

void MeanVar::merge(const MeanVar& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  kahan_add(mean_, mean_c_, delta * nb / n);
  kahan_add(m2_, m2_c_, other.m2_ + delta * delta * na * nb / n);
  n_ += other.n_;
}

double MeanVar::mean() const { return mean_; }

double MeanVar::variance() const {
  if (n_ < 2) return 0.0;
  return m2_ / static_cast<double>(n_ - 1);
}

double MeanVar::stderr_mean() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

double ks_statistic(std::vector<double> sample,
                    const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_statistic_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical_95(std::size_t n) {
  return 1.36 / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample_95(std::size_t n, std::size_t m) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return 1.36 * std::sqrt((nn + mm) / (nn * mm));
}

} // namespace rcbm
