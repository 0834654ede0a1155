#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldpbdp/process.hpp"
#include "ldpbdp/rate_functional.hpp"

namespace ldpbdp {

enum class EstimateMethod { Direct, ImportanceSampling, ExactOracle };

const char* to_string(EstimateMethod m);

struct EstimateReport {
  EstimateMethod method = EstimateMethod::Direct;
  double T = 0.0;
  double epsilon = 0.0;
  double log_prob_estimate = 0.0;
  double std_error_log = 0.0;
  double ci_low_log = 0.0;   // 95% interval, log scale
  double ci_high_log = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t hits = 0;       // replicas with nonzero contribution
  std::uint64_t truncated = 0;  // exploded/truncated replicas
  double psi_exponent = 0.0;
  double normalized_value = 0.0;  // -log_prob_estimate / psi(T)
  double effective_sample_size = 0.0;
  std::uint64_t master_seed = 0;
  std::string config_digest;
  std::vector<std::string> flags;

  double probability() const;
  // Standard error on the probability scale.
  double std_error() const;
};

struct EstimatorOptions {
  unsigned threads = 1;
  std::size_t jump_cap = 1000000;  // direct simulation only
  std::size_t profile_grid = kDefaultProfileGrid;
  std::string config_digest;
};

// Frequency of the tube event over direct simulations of the birth-death
// process. Replica i uses seed derive_seed(master_seed, i).
EstimateReport estimate_direct(const RateModel& model, const TubeSpec& tube, std::uint64_t replicas,
                               std::uint64_t master_seed, const EstimatorOptions& opts = {});

// Importance sampling from the unit-rate symmetric walk. Replica i contributes
// the log-weight T - a_T + b_T + n_T ln 2 when in the tube, zero otherwise.
EstimateReport estimate_is(const RateModel& model, const TubeSpec& tube, std::uint64_t replicas,
                           std::uint64_t master_seed, const EstimatorOptions& opts = {});

struct DecayRow {
  double T = 0.0;
  double epsilon = 0.0;
  double log_prob = 0.0;
  double std_error_log = 0.0;
  double normalized = 0.0;
  double normalized_std_error = 0.0;
  double rate_functional = 0.0;
  double psi_exponent = 0.0;
  std::uint64_t replicas = 0;
  std::uint64_t hits = 0;
  double ess = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> flags;
};

// One importance-sampling estimate per (epsilon, T) pair, normalized by
// psi(T) and reported next to the rate functional I(f). Rows are ordered by
// epsilon (outer) then T (inner).
std::vector<DecayRow> normalized_decay(const RateModel& model, const TargetProfile& f,
                                       const std::vector<double>& epsilons,
                                       const std::vector<double>& horizons, std::uint64_t replicas,
                                       std::uint64_t master_seed, const EstimatorOptions& opts = {});

// Distributes `chunks` work items over `threads` workers. fn(chunk) must only
// write to per-chunk state.
void parallel_chunks(std::size_t chunks, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace ldpbdp
