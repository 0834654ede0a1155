#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ldpbdp {

// Default evaluation grid on [0, 1]: 2^14 + 1 uniform points.
inline constexpr std::size_t kDefaultProfileGrid = (std::size_t{1} << 14) + 1;

struct ValueRange {
  double min = 0.0;
  double max = 0.0;
  // Bound on how far the true extrema may lie outside [min, max]. Zero when the
  // extrema are exact.
  double slack = 0.0;
  // True when slack is an empirical estimate (no continuity modulus declared).
  bool heuristic = false;
};

// Continuous target profile f on [0, 1].
class TargetProfile {
 public:
  using EvalFn = std::function<double(double)>;
  using RangeFn = std::function<ValueRange(double, double)>;

  // `lipschitz` is an optional Lipschitz constant; `exact_range` optionally
  // returns exact extrema over [a, b].
  explicit TargetProfile(EvalFn f, std::optional<double> lipschitz = std::nullopt,
                         RangeFn exact_range = {}, std::string name = "custom");

  // f(t) = slope * t.
  static TargetProfile linear(double slope = 1.0);
  // f(t) = t^k, k > 0.
  static TargetProfile power(double k);
  // Piecewise-linear interpolation through (knots[i], values[i]); knots span [0, 1].
  static TargetProfile table(std::vector<double> knots, std::vector<double> values);
  // Same on uniformly spaced knots.
  static TargetProfile table(std::vector<double> values);

  double operator()(double t) const { return f_(t); }
  const std::string& name() const noexcept { return name_; }
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  bool has_exact_range() const noexcept { return static_cast<bool>(range_); }

  // Extrema of f over [a, b] (0 <= a <= b <= 1). Falls back to evaluation at
  // the endpoints and every interior point of a uniform grid.
  ValueRange range(double a, double b, std::size_t grid = kDefaultProfileGrid) const;

  // c * f.
  TargetProfile scaled(double c) const;

 private:
  EvalFn f_;
  std::optional<double> lipschitz_;
  RangeFn range_;
  std::string name_;
};

struct ProfileCheckOptions {
  std::size_t grid = 10000;
  double continuity_tolerance = 1e-2;  // max adjacent difference on the grid
  double zero_tolerance = 1e-12;       // |f(0)|
};

// Throws ValidationError unless f(0) = 0, f > 0 on (0, 1] and f looks
// continuous on the check grid.
void validate_profile(const TargetProfile& f, const ProfileCheckOptions& opts = {});

bool is_nondecreasing(const TargetProfile& f, std::size_t grid = 10000);

}  // namespace ldpbdp
