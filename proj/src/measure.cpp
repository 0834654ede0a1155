#include "ldpbdp/measure.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>

namespace ldpbdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Intensity of the jump x -> x + sign.
double jump_intensity(const RateModel& model, State x, int sign) {
  return sign > 0 ? model.birth(x) : model.death(x);
}

}  // namespace

PathFunctionals compute_functionals(const RateModel& model, PathView path) {
  PathFunctionals out;
  State x = path.start;
  double prev = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double t = path.times[i];
    const int s = path.signs[i];
    out.a_T += model.total(x) * (t - prev);
    const double nu = jump_intensity(model, x, s);
    out.b_T = nu > 0.0 ? out.b_T + std::log(nu) : kNegInf;
    (s > 0 ? out.k_plus : out.k_minus) += 1;
    x += s;
    prev = t;
  }
  out.a_T += model.total(x) * (path.horizon - prev);
  out.n_T = static_cast<std::int64_t>(path.times.size());
  out.L = out.k_plus - out.k_minus;
  assert(out.k_plus + out.k_minus == out.n_T);
  return out;
}

double log_density(const RateModel& model, PathView path) {
  const double T = path.horizon;
  if (path.times.empty()) return -(model.total(path.start) - 1.0) * T;
  double acc = static_cast<double>(path.times.size()) * std::numbers::ln2;
  State x = path.start;
  double prev = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double nu = jump_intensity(model, x, path.signs[i]);
    if (!(nu > 0.0)) return kNegInf;
    acc += -(model.total(x) - 1.0) * (path.times[i] - prev) + std::log(nu);
    x += path.signs[i];
    prev = path.times[i];
  }
  return acc - (model.total(x) - 1.0) * (T - prev);
}

double log_weight(const PathFunctionals& f, double T) {
  if (f.b_T == kNegInf) return kNegInf;
  return T - f.a_T + f.b_T + static_cast<double>(f.n_T) * std::numbers::ln2;
}

JumpBalance jump_balance(PathView path) {
  JumpBalance b;
  for (int s : path.signs) (s > 0 ? b.k_plus : b.k_minus) += 1;
  b.L = b.k_plus - b.k_minus;
  const auto n = static_cast<std::int64_t>(path.signs.size());
  assert(b.k_plus + b.k_minus == n);
  assert(2 * b.k_plus == n + b.L && 2 * b.k_minus == n - b.L);
  (void)n;
  return b;
}

}  // namespace ldpbdp
