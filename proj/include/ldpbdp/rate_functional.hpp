#pragma once

#include <cstddef>
#include <string>

#include "ldpbdp/measure.hpp"
#include "ldpbdp/process.hpp"
#include "ldpbdp/profile.hpp"

namespace ldpbdp {

enum class Regime { BirthDominant, Balanced, DeathDominant, Degenerate };

const char* to_string(Regime r);

struct RegimeClassification {
  Regime regime = Regime::BirthDominant;
  double psi_exponent = 1.0;  // psi(T) = T^psi_exponent, exponent = max(l, m) + 1
};

// Pure-birth models classify as BirthDominant.
RegimeClassification classify(const RateModel& model);

double psi(const RegimeClassification& c, double T);

inline constexpr std::size_t kDefaultQuadPoints = (std::size_t{1} << 20) + 1;

struct QuadratureResult {
  double value = 0.0;
  double last_change = 0.0;  // |difference| between the final two refinements
  std::size_t points = 0;
  bool converged = false;
};

// Romberg integration of g over [0, 1]: trapezoid halving plus Richardson
// extrapolation, until successive diagonal entries agree to `rel_tol` or the
// point budget is spent.
QuadratureResult romberg(const std::function<double(double)>& g, std::size_t max_points,
                         double rel_tol = 1e-9);

// int_0^1 f(t)^p dt.
QuadratureResult integrate_power(const TargetProfile& f, double p,
                                 std::size_t max_points = kDefaultQuadPoints);

// Rate functional for f: P_l int f^l (l > m), (sqrt P_l - sqrt Q_m)^2 int f^l
// (l = m, P_l != Q_m), Q_m int f^m (l < m). Refuses the degenerate regime.
double rate_functional(const RateModel& model, const TargetProfile& f,
                       std::size_t quad_points = kDefaultQuadPoints);

// Pure-birth variant: f must be non-decreasing with f(0) = 0.
double yule_rate_functional(const RateModel& model, const TargetProfile& f,
                            std::size_t quad_points = kDefaultQuadPoints);

// The event {sup_t |f(t) - xi_T(t)| < epsilon} for horizon T.
struct TubeSpec {
  TargetProfile profile;
  double epsilon = 0.0;
  double T = 0.0;
};

// Sup-distances within this of epsilon count as boundary cases (non-member).
inline constexpr double kBoundaryTolerance = 1e-12;

struct TubeCheck {
  bool member = false;
  double sup_distance = 0.0;
  double uncertainty = 0.0;  // possible underestimate of sup_distance from grid evaluation
  bool boundary = false;     // |sup_distance - epsilon| <= kBoundaryTolerance
  bool ambiguous = false;    // epsilon lies within [sup_distance, sup_distance + uncertainty]
  bool heuristic = false;    // uncertainty is empirical (no modulus declared)
};

// Streaming sup-distance tracker: feed constancy intervals of the unscaled
// path in time order.
class TubeMonitor {
 public:
  TubeMonitor(const TargetProfile& f, double epsilon, double T,
              std::size_t grid = kDefaultProfileGrid);

  // The unscaled path holds `state` on [t0, t1]. Returns false once the path
  // is known to be outside the tube.
  bool hold(double t0, double t1, State state);

  bool inside() const noexcept { return sup_ < epsilon_ - kBoundaryTolerance; }
  TubeCheck result() const;

 private:
  const TargetProfile* f_;
  double epsilon_;
  double T_;
  std::size_t grid_;
  double sup_ = 0.0;
  double slack_ = 0.0;
  bool heuristic_ = false;
};

// Exact decision per constancy interval of the rescaled path.
TubeCheck tube_membership(PathView path, const TargetProfile& f, double epsilon,
                          std::size_t grid = kDefaultProfileGrid);

// Exploded or truncated outcomes lie outside every tube.
TubeCheck tube_membership(const SimOutcome& outcome, const TargetProfile& f, double epsilon,
                          std::size_t grid = kDefaultProfileGrid);

}  // namespace ldpbdp
