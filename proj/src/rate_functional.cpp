#include "ldpbdp/rate_functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "ldpbdp/error.hpp"

namespace ldpbdp {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::BirthDominant: return "birth-dominant";
    case Regime::Balanced: return "balanced";
    case Regime::DeathDominant: return "death-dominant";
    case Regime::Degenerate: return "degenerate";
  }
  return "unknown";
}

RegimeClassification classify(const RateModel& model) {
  const auto& a = model.asymptotics();
  RegimeClassification c;
  if (model.pure_birth() || a.l > a.m) {
    c.regime = Regime::BirthDominant;
  } else if (a.l < a.m) {
    c.regime = Regime::DeathDominant;
  } else {
    c.regime = a.P_l == a.Q_m ? Regime::Degenerate : Regime::Balanced;
  }
  c.psi_exponent = (model.pure_birth() ? a.l : std::max(a.l, a.m)) + 1.0;
  return c;
}

double psi(const RegimeClassification& c, double T) { return std::pow(T, c.psi_exponent); }

QuadratureResult romberg(const std::function<double(double)>& g, std::size_t max_points,
                         double rel_tol) {
  constexpr int kMinLevels = 4;
  std::vector<double> prev_row{0.5 * (g(0.0) + g(1.0))};
  std::size_t intervals = 1;
  QuadratureResult res{prev_row[0], std::numeric_limits<double>::infinity(), 2, false};
  for (int level = 1; intervals * 2 + 1 <= max_points; ++level) {
    const double h = 1.0 / static_cast<double>(intervals * 2);
    double mid_sum = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) mid_sum += g((2.0 * static_cast<double>(i) + 1.0) * h);
    intervals *= 2;
    std::vector<double> row(static_cast<std::size_t>(level) + 1);
    row[0] = 0.5 * prev_row[0] + h * mid_sum;
    double factor = 1.0;
    for (int k = 1; k <= level; ++k) {
      factor *= 4.0;
      row[k] = row[k - 1] + (row[k - 1] - prev_row[k - 1]) / (factor - 1.0);
    }
    res.last_change = std::abs(row[level] - prev_row[level - 1]);
    res.value = row[level];
    res.points = intervals + 1;
    prev_row = std::move(row);
    if (level >= kMinLevels && res.last_change <= rel_tol * std::abs(res.value)) {
      res.converged = true;
      break;
    }
    // Romberg tableaux past ~20 columns gain nothing in double precision.
    if (level >= 30) break;
  }
  if (res.value == 0.0 && res.last_change == 0.0) res.converged = true;
  return res;
}

QuadratureResult integrate_power(const TargetProfile& f, double p, std::size_t max_points) {
  return romberg([&f, p](double t) { return p == 0.0 ? 1.0 : std::pow(std::max(f(t), 0.0), p); },
                 max_points);
}

double rate_functional(const RateModel& model, const TargetProfile& f, std::size_t quad_points) {
  if (quad_points < 3) throw ValidationError("quad_points", "must be at least 3");
  const auto c = classify(model);
  if (c.regime == Regime::Degenerate)
    throw ValidationError("model",
                          "l = m with P_l = Q_m needs a different normalization; refusing to "
                          "evaluate the rate functional");
  validate_profile(f);
  const auto& a = model.asymptotics();
  switch (c.regime) {
    case Regime::BirthDominant:
      return a.P_l * integrate_power(f, a.l, quad_points).value;
    case Regime::Balanced: {
      const double d = std::sqrt(a.P_l) - std::sqrt(a.Q_m);
      return d * d * integrate_power(f, a.l, quad_points).value;
    }
    case Regime::DeathDominant:
      return a.Q_m * integrate_power(f, a.m, quad_points).value;
    case Regime::Degenerate: break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double yule_rate_functional(const RateModel& model, const TargetProfile& f, std::size_t quad_points) {
  if (!model.pure_birth()) throw ValidationError("model", "pure-birth model (mu == 0) required");
  if (!(std::abs(f(0.0)) <= 1e-12)) throw ValidationError("profile", "f(0) must be 0");
  if (!is_nondecreasing(f))
    throw ValidationError("profile", "f must be non-decreasing for the pure-birth functional");
  const auto& a = model.asymptotics();
  return a.P_l * integrate_power(f, a.l, quad_points).value;
}

TubeMonitor::TubeMonitor(const TargetProfile& f, double epsilon, double T, std::size_t grid)
    : f_(&f), epsilon_(epsilon), T_(T), grid_(grid) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
}

bool TubeMonitor::hold(double t0, double t1, State state) {
  const double a = std::clamp(t0 / T_, 0.0, 1.0);
  const double b = std::clamp(t1 / T_, 0.0, 1.0);
  const ValueRange r = f_->range(a, b, grid_);
  const double c = static_cast<double>(state) / T_;
  const double d = std::max(std::abs(r.max - c), std::abs(r.min - c));
  if (d > sup_) sup_ = d;
  slack_ = std::max(slack_, r.slack);
  heuristic_ = heuristic_ || r.heuristic;
  return inside();
}

TubeCheck TubeMonitor::result() const {
  TubeCheck out;
  out.sup_distance = sup_;
  out.uncertainty = slack_;
  out.heuristic = heuristic_;
  out.boundary = std::abs(sup_ - epsilon_) <= kBoundaryTolerance;
  out.member = inside();
  out.ambiguous = out.member && sup_ + slack_ >= epsilon_;
  return out;
}

TubeCheck tube_membership(PathView path, const TargetProfile& f, double epsilon, std::size_t grid) {
  TubeMonitor mon(f, epsilon, path.horizon, grid);
  State x = path.start;
  double prev = 0.0;
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    mon.hold(prev, path.times[i], x);
    x += path.signs[i];
    prev = path.times[i];
  }
  mon.hold(prev, path.horizon, x);
  return mon.result();
}

TubeCheck tube_membership(const SimOutcome& outcome, const TargetProfile& f, double epsilon,
                          std::size_t grid) {
  if (outcome.status != SimStatus::Completed) {
    TubeCheck out;
    out.sup_distance = std::numeric_limits<double>::infinity();
    return out;
  }
  return tube_membership(PathView(outcome.path), f, epsilon, grid);
}

}  // namespace ldpbdp
