#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ldpbdp/process.hpp"
#include "ldpbdp/rate_functional.hpp"

namespace ldpbdp {

// Birth-death generator restricted to {0, ..., state_cap}. Jumps above the
// cap leave the system (absorbing boundary), so row sums are <= 0.
struct TruncatedGenerator {
  State state_cap = 0;
  std::vector<double> birth;
  std::vector<double> death;

  TruncatedGenerator(const RateModel& model, State cap);

  double exit_rate(State x) const { return birth[static_cast<std::size_t>(x)] + death[static_cast<std::size_t>(x)]; }
  // Sum of row x of the generator restricted to the band [lo, hi].
  double row_sum(State x, State lo, State hi) const;
};

// States allowed on [t0, t1] (unscaled time); lo > hi means empty.
struct Band {
  State lo = 0;
  State hi = -1;
  bool empty() const noexcept { return lo > hi; }
};

struct BandSlice {
  double t0 = 0.0;
  double t1 = 0.0;
  Band inner;  // allowed for every t in the slice
  Band outer;  // allowed for some t in the slice
};

struct OracleOptions {
  double per_slice_tolerance = 1e-12;  // uniformization truncation error per slice
  double work_budget = 5e9;            // estimated multiply-adds
};

struct OracleResult {
  double log_inner = 0.0;  // ln of the inner (lower) approximation
  double log_outer = 0.0;  // ln of the outer (upper) approximation
  double truncation_error = 0.0;  // accumulated uniformization error bound (absolute)
  std::optional<double> empty_at;  // time (rescaled) where the tube band is empty
  std::size_t time_slices = 0;

  double inner() const;
  double outer() const;
  // ln((inner + outer) / 2).
  double log_midpoint() const;
};

// Probability that the chain started at `start` stays inside the slice bands
// throughout. Uses bands[i].inner when `use_inner`, else bands[i].outer.
// Returns ln of the surviving mass.
double taboo_log_probability(const TruncatedGenerator& gen, std::span<const BandSlice> bands,
                             bool use_inner, State start = 0, const OracleOptions& opts = {},
                             double* truncation_error = nullptr);

// Inner/outer band schedule for a tube, one slice per 1/time_slices of [0, 1].
std::vector<BandSlice> tube_bands(const TubeSpec& tube, std::size_t time_slices, State state_cap,
                                  std::size_t profile_grid = kDefaultProfileGrid);

// Bracket [inner, outer] for P(xi_T in tube) on a sliced time axis.
OracleResult tube_probability_exact(const RateModel& model, const TubeSpec& tube,
                                    std::size_t time_slices, State state_cap,
                                    const OracleOptions& opts = {});

}  // namespace ldpbdp
