#include "ldpbdp/profile.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ldpbdp/error.hpp"

namespace ldpbdp {

TargetProfile::TargetProfile(EvalFn f, std::optional<double> lipschitz, RangeFn exact_range,
                             std::string name)
    : f_(std::move(f)), lipschitz_(lipschitz), range_(std::move(exact_range)), name_(std::move(name)) {
  if (!f_) throw ValidationError("profile", "evaluation function must be callable");
  if (lipschitz_ && !(*lipschitz_ >= 0.0))
    throw ValidationError("profile.modulus", "Lipschitz constant must be non-negative");
}

TargetProfile TargetProfile::linear(double slope) {
  if (!(slope > 0.0) || !std::isfinite(slope))
    throw ValidationError("profile", "linear slope must be positive");
  return TargetProfile(
      [slope](double t) { return slope * t; }, slope,
      [slope](double a, double b) { return ValueRange{slope * a, slope * b}; },
      slope == 1.0 ? "linear" : fmt::format("linear:{}", slope));
}

TargetProfile TargetProfile::power(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("profile", "power exponent must be > 0");
  std::optional<double> lip;
  if (k >= 1.0) lip = k;
  return TargetProfile(
      [k](double t) { return std::pow(t, k); }, lip,
      [k](double a, double b) { return ValueRange{std::pow(a, k), std::pow(b, k)}; },
      fmt::format("power:{}", k));
}

TargetProfile TargetProfile::table(std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.size() < 2)
    throw ValidationError("profile.table", "need at least two (knot, value) pairs");
  if (knots.front() != 0.0 || knots.back() != 1.0)
    throw ValidationError("profile.table", "knots must start at 0 and end at 1");
  double lip = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1]))
      throw ValidationError("profile.table", "knots must be strictly increasing");
    if (!std::isfinite(values[i]) || !std::isfinite(values[i - 1]))
      throw ValidationError("profile.table", "values must be finite");
    lip = std::max(lip, std::abs(values[i] - values[i - 1]) / (knots[i] - knots[i - 1]));
  }
  auto interp = [knots, values](double t) {
    if (t <= 0.0) return values.front();
    if (t >= 1.0) return values.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), t) -
                                             knots.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - knots[lo]) / (knots[hi] - knots[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
  };
  // Extrema of a piecewise-linear function sit at the endpoints or at knots.
  auto range = [knots, values, interp](double a, double b) {
    ValueRange r{interp(a), interp(a)};
    auto take = [&r](double v) {
      r.min = std::min(r.min, v);
      r.max = std::max(r.max, v);
    };
    take(interp(b));
    auto it = std::upper_bound(knots.begin(), knots.end(), a);
    for (; it != knots.end() && *it < b; ++it)
      take(values[static_cast<std::size_t>(it - knots.begin())]);
    return r;
  };
  return TargetProfile(interp, lip, range, fmt::format("table({})", knots.size()));
}

TargetProfile TargetProfile::table(std::vector<double> values) {
  if (values.size() < 2) throw ValidationError("profile.table", "need at least two values");
  std::vector<double> knots(values.size());
  const double n = static_cast<double>(values.size() - 1);
  for (std::size_t i = 0; i < knots.size(); ++i) knots[i] = static_cast<double>(i) / n;
  knots.back() = 1.0;
  return table(std::move(knots), std::move(values));
}

ValueRange TargetProfile::range(double a, double b, std::size_t grid) const {
  if (range_) return range_(a, b);
  ValueRange r{f_(a), f_(a)};
  double prev_t = a;
  double prev_v = r.min;
  double max_gap = 0.0;
  double max_step = 0.0;
  auto take = [&](double t) {
    const double v = f_(t);
    r.min = std::min(r.min, v);
    r.max = std::max(r.max, v);
    max_gap = std::max(max_gap, t - prev_t);
    max_step = std::max(max_step, std::abs(v - prev_v));
    prev_t = t;
    prev_v = v;
  };
  const double scale = static_cast<double>(grid - 1);
  for (auto i = static_cast<std::size_t>(std::floor(a * scale)) + 1;
       static_cast<double>(i) < b * scale; ++i)
    take(static_cast<double>(i) / scale);
  if (b > a) take(b);
  if (lipschitz_) {
    r.slack = *lipschitz_ * max_gap / 2.0;
  } else {
    r.slack = max_step;
    r.heuristic = true;
  }
  return r;
}

TargetProfile TargetProfile::scaled(double c) const {
  std::optional<double> lip;
  if (lipschitz_) lip = std::abs(c) * *lipschitz_;
  RangeFn rng;
  if (range_) {
    rng = [r = range_, c](double a, double b) {
      ValueRange v = r(a, b);
      const double lo = c * v.min;
      const double hi = c * v.max;
      return ValueRange{std::min(lo, hi), std::max(lo, hi), std::abs(c) * v.slack, v.heuristic};
    };
  }
  return TargetProfile([f = f_, c](double t) { return c * f(t); }, lip, rng,
                       fmt::format("{}*{}", c, name_));
}

void validate_profile(const TargetProfile& f, const ProfileCheckOptions& opts) {
  const double f0 = f(0.0);
  if (!(std::abs(f0) <= opts.zero_tolerance))
    throw ValidationError("profile", fmt::format("f(0) = {} but must be 0", f0));
  const double n = static_cast<double>(opts.grid);
  double prev = f0;
  for (std::size_t i = 1; i <= opts.grid; ++i) {
    const double t = static_cast<double>(i) / n;
    const double v = f(t);
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError("profile", fmt::format("f({}) = {} but must be positive on (0, 1]", t, v));
    if (std::abs(v - prev) > opts.continuity_tolerance)
      throw ValidationError("profile",
                            fmt::format("jump of {} near t = {} exceeds the continuity tolerance {}",
                                        std::abs(v - prev), t, opts.continuity_tolerance));
    prev = v;
  }
}

bool is_nondecreasing(const TargetProfile& f, std::size_t grid) {
  double prev = f(0.0);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double v = f(static_cast<double>(i) / static_cast<double>(grid));
    if (v < prev) return false;
    prev = v;
  }
  return true;
}

}  // namespace ldpbdp
