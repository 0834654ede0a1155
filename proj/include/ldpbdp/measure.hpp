#pragma once

#include <cstdint>
#include <span>

#include "ldpbdp/process.hpp"

namespace ldpbdp {

// Non-owning view of a jump path; lets hot loops reuse buffers.
struct PathView {
  double horizon = 0.0;
  std::span<const double> times;
  std::span<const int> signs;
  State start = 0;

  PathView() = default;
  PathView(double T, std::span<const double> t, std::span<const int> s, State x0 = 0)
      : horizon(T), times(t), signs(s), start(x0) {}
  PathView(const JumpPath& p)  // NOLINT(google-explicit-constructor)
      : horizon(p.horizon()), times(p.jump_times()), signs(p.jump_signs()), start(p.start_state()) {}
};

struct PathFunctionals {
  double a_T = 0.0;   // integral of h along the path
  double b_T = 0.0;   // sum of log jump intensities; -inf if some intensity is zero
  std::int64_t n_T = 0;
  std::int64_t k_plus = 0;
  std::int64_t k_minus = 0;
  std::int64_t L = 0;  // k_plus - k_minus
};

PathFunctionals compute_functionals(const RateModel& model, PathView path);

// ln of the density of the birth-death law with respect to the unit-rate
// symmetric walk, evaluated factor by factor:
//   N ln 2 + sum_i [-(h(x_{i-1}) - 1) tau_i + ln nu(x_{i-1}, x_i)] - (h(x_N) - 1)(T - t_N).
// Returns -inf when some jump has zero intensity.
double log_density(const RateModel& model, PathView path);

// The same quantity assembled from the path functionals: T - a_T + b_T + n_T ln 2.
double log_weight(const PathFunctionals& f, double T);

struct JumpBalance {
  std::int64_t k_plus = 0;
  std::int64_t k_minus = 0;
  std::int64_t L = 0;
};

JumpBalance jump_balance(PathView path);

}  // namespace ldpbdp
