#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

namespace ldpbdp {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  void scale(double f) noexcept {
    sum_ *= f;
    comp_ *= f;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Accumulates importance weights given as logarithms. Keeps the running
// maximum as a shift so that sum(w) and sum(w^2) never overflow. Merging two
// accumulators in a fixed order is deterministic.
class LogWeightAccumulator {
 public:
  void add(double log_w);
  void merge(const LogWeightAccumulator& other);

  std::uint64_t count() const noexcept { return count_; }      // all weights, including zeros
  std::uint64_t nonzero() const noexcept { return nonzero_; }  // finite log-weights

  // ln of the mean weight; -inf when every weight is zero.
  double log_mean() const;
  // Standard error of the mean divided by the mean (delta-method se of log_mean).
  double relative_std_error() const;
  // (sum w)^2 / sum w^2.
  double effective_sample_size() const;

  void add_count(std::uint64_t zeros) noexcept { count_ += zeros; }

 private:
  void rescale_to(double new_shift);

  double shift_ = -std::numeric_limits<double>::infinity();
  CompensatedSum s1_;
  CompensatedSum s2_;
  std::uint64_t count_ = 0;
  std::uint64_t nonzero_ = 0;
};

// Two-sided Clopper-Pearson interval for a binomial proportion.
std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t trials,
                                          double confidence = 0.95);

}  // namespace ldpbdp
