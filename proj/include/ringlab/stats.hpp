#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ringlab {

// Monte Carlo mean with sample count, sample variance, and standard error.
struct MCEstimate {
  double mean = 0.0;
  std::uint64_t n = 0;
  double variance = 0.0;  // unbiased, M2/(n-1)

  double std_error() const {
    return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
  }
};

// Streaming count/mean/M2 accumulator (Welford) with exact pairwise merge,
// so a fixed merge order gives results independent of completion order.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningStats& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double delta = other.mean_ - mean_;
    const double nt = na + nb;
    mean_ += delta * (nb / nt);
    m2_ += other.m2_ + delta * delta * (na * nb / nt);
    n_ += other.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }

  double variance() const {
    if (n_ < 2) throw std::runtime_error("variance needs at least 2 samples");
    return m2_ / static_cast<double>(n_ - 1);
  }

  MCEstimate estimate() const { return {mean(), count(), variance()}; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Stats of a stored sample vector, accumulated in fixed chunks and merged in
// index order: bit-identical for any thread count that produced the vector.
inline RunningStats chunked_stats(std::span<const double> values,
                                  std::size_t chunk = 256) {
  RunningStats total;
  for (std::size_t begin = 0; begin < values.size(); begin += chunk) {
    RunningStats part;
    const std::size_t end = std::min(values.size(), begin + chunk);
    for (std::size_t i = begin; i < end; ++i) part.add(values[i]);
    total.merge(part);
  }
  return total;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw std::runtime_error("median of empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::runtime_error("quantile of empty set");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  std::sort(v.begin(), v.end());
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// Least-squares slope of y against x.
inline double regression_slope(std::span<const double> x,
                               std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("regression needs >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) throw std::invalid_argument("regression x values coincide");
  return sxy / sxx;
}

struct KSResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 l^2).
inline double ks_tail(double lambda) {
  if (lambda <= 0) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Two-sample Kolmogorov-Smirnov test with the usual finite-sample
// correction of the asymptotic p-value.
inline KSResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("KS test needs nonempty samples");
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
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  return {d, ks_tail(lambda)};
}

}  // namespace ringlab
