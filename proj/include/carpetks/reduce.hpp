#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace carpetks {

// |x|^p with exact arithmetic for the common exponents, so that scaling a
// function by a power of two scales these terms without rounding.
inline double pow_abs(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 1.0) return std::abs(x);
  return std::pow(std::abs(x), p);
}

// Pairwise-tree summation with fixed block boundaries. The result depends
// only on the element order, never on thread scheduling, so parallel callers
// that fill a buffer in a deterministic order get reproducible totals.
inline double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 32) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Streaming accumulator: buffers block sums and reduces them pairwise.
class PairwiseAccumulator {
 public:
  explicit PairwiseAccumulator(std::size_t block = 4096) : block_(block) {}

  void add(double x) {
    cur_ += x;
    if (++fill_ == block_) {
      sums_.push_back(cur_);
      cur_ = 0.0;
      fill_ = 0;
    }
  }

  double total() const {
    double tail = cur_;
    return pairwise_sum(sums_) + tail;
  }

 private:
  std::size_t block_;
  std::size_t fill_ = 0;
  double cur_ = 0.0;
  std::vector<double> sums_;
};

}  // namespace carpetks
