#include "ldpbdp/stats.hpp"

#include <algorithm>

#include <boost/math/distributions/beta.hpp>

namespace ldpbdp {

void LogWeightAccumulator::rescale_to(double new_shift) {
  if (new_shift == shift_) return;
  if (std::isfinite(shift_)) {
    const double f = std::exp(shift_ - new_shift);
    s1_.scale(f);
    s2_.scale(f * f);
  }
  shift_ = new_shift;
}

void LogWeightAccumulator::add(double log_w) {
  ++count_;
  if (!(log_w > -std::numeric_limits<double>::infinity())) return;
  ++nonzero_;
  if (log_w > shift_) rescale_to(log_w);
  const double w = std::exp(log_w - shift_);
  s1_.add(w);
  s2_.add(w * w);
}

void LogWeightAccumulator::merge(const LogWeightAccumulator& other) {
  count_ += other.count_;
  nonzero_ += other.nonzero_;
  if (other.nonzero_ == 0) return;
  if (other.shift_ > shift_) rescale_to(other.shift_);
  const double f = std::exp(other.shift_ - shift_);
  s1_.add(other.s1_.value() * f);
  s2_.add(other.s2_.value() * f * f);
}

double LogWeightAccumulator::log_mean() const {
  if (nonzero_ == 0 || count_ == 0) return -std::numeric_limits<double>::infinity();
  return shift_ + std::log(s1_.value()) - std::log(static_cast<double>(count_));
}

double LogWeightAccumulator::relative_std_error() const {
  if (nonzero_ == 0) return std::numeric_limits<double>::infinity();
  if (count_ < 2) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(count_);
  const double s1 = s1_.value();
  const double ratio = n * s2_.value() / (s1 * s1);
  return std::sqrt(std::max(ratio - 1.0, 0.0) / (n - 1.0));
}

double LogWeightAccumulator::effective_sample_size() const {
  if (nonzero_ == 0) return 0.0;
  const double s1 = s1_.value();
  return std::min(s1 * s1 / s2_.value(), static_cast<double>(count_));
}

std::pair<double, double> clopper_pearson(std::uint64_t hits, std::uint64_t trials,
                                          double confidence) {
  const double alpha = 1.0 - confidence;
  const auto h = static_cast<double>(hits);
  const auto n = static_cast<double>(trials);
  double lo = 0.0;
  double hi = 1.0;
  if (hits > 0) lo = boost::math::quantile(boost::math::beta_distribution<>(h, n - h + 1.0), alpha / 2.0);
  if (hits < trials)
    hi = boost::math::quantile(boost::math::beta_distribution<>(h + 1.0, n - h), 1.0 - alpha / 2.0);
  return {lo, hi};
}

}  // namespace ldpbdp
