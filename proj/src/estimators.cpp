#include "ldpbdp/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "ldpbdp/error.hpp"
#include "ldpbdp/measure.hpp"
#include "ldpbdp/rng.hpp"
#include "ldpbdp/stats.hpp"

namespace ldpbdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kChunk = 4096;

void check_inputs(const TubeSpec& tube, std::uint64_t replicas) {
  if (replicas < 1) throw ValidationError("replicas", "must be >= 1");
  if (!(tube.T > 0.0) || !std::isfinite(tube.T)) throw ValidationError("T", "must be positive");
  if (!(tube.epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
  validate_profile(tube.profile);
}

void finish(EstimateReport& r, const RateModel& model) {
  const auto c = classify(model);
  r.psi_exponent = c.psi_exponent;
  if (c.regime == Regime::Degenerate) {
    r.normalized_value = std::numeric_limits<double>::quiet_NaN();
    r.flags.emplace_back("degenerate regime: normalized value undefined");
  } else {
    r.normalized_value = -r.log_prob_estimate / psi(c, r.T);
  }
  if (r.log_prob_estimate > 0.0) r.flags.emplace_back("log_prob > 0 (statistical noise)");
}

}  // namespace

const char* to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::Direct: return "direct";
    case EstimateMethod::ImportanceSampling: return "is";
    case EstimateMethod::ExactOracle: return "oracle";
  }
  return "unknown";
}

double EstimateReport::probability() const { return std::exp(log_prob_estimate); }

double EstimateReport::std_error() const {
  if (!std::isfinite(log_prob_estimate)) return 0.0;
  return probability() * std_error_log;
}

void parallel_chunks(std::size_t chunks, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(chunks, 1))));
  if (threads == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chunks) return;
        try {
          fn(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(chunks);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

EstimateReport estimate_direct(const RateModel& model, const TubeSpec& tube, std::uint64_t replicas,
                               std::uint64_t master_seed, const EstimatorOptions& opts) {
  check_inputs(tube, replicas);
  validate_structure(model);
  const double T = tube.T;
  const std::size_t chunks = (replicas + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> chunk_hits(chunks, 0);
  std::vector<std::uint64_t> chunk_exploded(chunks, 0);

  parallel_chunks(chunks, opts.threads, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(replicas, begin + kChunk);
    for (std::uint64_t i = begin; i < end; ++i) {
      // Same draw order as simulate_bdp, stopped as soon as the tube is left.
      Rng rng(derive_seed(master_seed, i));
      TubeMonitor mon(tube.profile, tube.epsilon, T, opts.profile_grid);
      State x = 0;
      double t = 0.0;
      std::size_t jumps = 0;
      for (;;) {
        const double lam = model.birth(x);
        const double mu = model.death(x);
        const double h = lam + mu;
        if (!std::isfinite(h) || !(lam > 0.0) || mu < 0.0)
          throw ModelEvaluationError(x, fmt::format("invalid rates lambda={} mu={}", lam, mu));
        const double t_next = t + rng.exponential(h);
        if (t_next > T) {
          if (mon.hold(t, T, x)) ++chunk_hits[c];
          break;
        }
        if (!mon.hold(t, t_next, x)) break;
        if (jumps >= opts.jump_cap || !(t_next > t)) {
          ++chunk_exploded[c];
          break;
        }
        x += rng.uniform() * h < lam ? 1 : -1;
        t = t_next;
        ++jumps;
      }
    }
  });

  EstimateReport r;
  r.method = EstimateMethod::Direct;
  r.T = T;
  r.epsilon = tube.epsilon;
  r.replicas = replicas;
  r.master_seed = master_seed;
  r.config_digest = opts.config_digest;
  for (std::size_t c = 0; c < chunks; ++c) {
    r.hits += chunk_hits[c];
    r.truncated += chunk_exploded[c];
  }
  const double n = static_cast<double>(replicas);
  const double h = static_cast<double>(r.hits);
  r.effective_sample_size = n;
  if (r.hits == 0) {
    r.log_prob_estimate = kNegInf;
    r.std_error_log = std::numeric_limits<double>::infinity();
    r.flags.emplace_back("no hits; use importance sampling");
  } else {
    r.log_prob_estimate = std::log(h / n);
    r.std_error_log = std::sqrt((1.0 - h / n) / h);
  }
  if (r.hits < 10) {
    const auto [lo, hi] = clopper_pearson(r.hits, replicas);
    r.ci_low_log = lo > 0.0 ? std::log(lo) : kNegInf;
    r.ci_high_log = std::log(hi);
    r.flags.emplace_back("fewer than 10 hits: Clopper-Pearson interval");
  } else {
    r.ci_low_log = r.log_prob_estimate - kZ95 * r.std_error_log;
    r.ci_high_log = std::min(0.0, r.log_prob_estimate + kZ95 * r.std_error_log);
  }
  if (r.truncated > 0) r.flags.push_back(fmt::format("{} replicas hit the jump cap", r.truncated));
  finish(r, model);
  return r;
}

EstimateReport estimate_is(const RateModel& model, const TubeSpec& tube, std::uint64_t replicas,
                           std::uint64_t master_seed, const EstimatorOptions& opts) {
  check_inputs(tube, replicas);
  validate_structure(model);
  const double T = tube.T;
  const std::size_t cap = reference_jump_cap(T);
  const std::size_t chunks = (replicas + kChunk - 1) / kChunk;
  std::vector<LogWeightAccumulator> acc(chunks);
  std::vector<std::uint64_t> chunk_truncated(chunks, 0);

  parallel_chunks(chunks, opts.threads, [&](std::size_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(replicas, begin + kChunk);
    std::vector<double> times;
    std::vector<int> signs;
    for (std::uint64_t i = begin; i < end; ++i) {
      // Same draw order as simulate_reference, stopped once outside the tube.
      Rng rng(derive_seed(master_seed, i));
      TubeMonitor mon(tube.profile, tube.epsilon, T, opts.profile_grid);
      times.clear();
      signs.clear();
      State x = 0;
      double t = 0.0;
      double log_w = kNegInf;
      for (;;) {
        const double t_next = t + rng.exponential(1.0);
        if (t_next > T) {
          if (mon.hold(t, T, x))
            log_w = log_weight(compute_functionals(model, PathView(T, times, signs)), T);
          break;
        }
        if (!mon.hold(t, t_next, x)) break;
        if (times.size() >= cap) {
          ++chunk_truncated[c];
          break;
        }
        const int s = rng.coin() ? 1 : -1;
        times.push_back(t_next);
        signs.push_back(s);
        x += s;
        t = t_next;
      }
      acc[c].add(log_w);
    }
  });

  LogWeightAccumulator total;
  std::uint64_t truncated = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    total.merge(acc[c]);
    truncated += chunk_truncated[c];
  }

  EstimateReport r;
  r.method = EstimateMethod::ImportanceSampling;
  r.T = T;
  r.epsilon = tube.epsilon;
  r.replicas = replicas;
  r.hits = total.nonzero();
  r.truncated = truncated;
  r.master_seed = master_seed;
  r.config_digest = opts.config_digest;
  r.log_prob_estimate = total.log_mean();
  r.std_error_log = total.relative_std_error();
  r.effective_sample_size = total.effective_sample_size();
  if (r.hits == 0) {
    r.flags.emplace_back("no admissible zeta paths");
    r.ci_low_log = kNegInf;
    r.ci_high_log = kNegInf;
  } else {
    const double lo = 1.0 - kZ95 * r.std_error_log;
    r.ci_low_log = lo > 0.0 ? r.log_prob_estimate + std::log(lo) : kNegInf;
    r.ci_high_log = r.log_prob_estimate + std::log1p(kZ95 * r.std_error_log);
  }
  if (truncated > 0)
    r.flags.push_back(fmt::format("{} zeta replicas aborted at the jump cap", truncated));
  finish(r, model);
  return r;
}

std::vector<DecayRow> normalized_decay(const RateModel& model, const TargetProfile& f,
                                       const std::vector<double>& epsilons,
                                       const std::vector<double>& horizons, std::uint64_t replicas,
                                       std::uint64_t master_seed, const EstimatorOptions& opts) {
  const auto c = classify(model);
  if (c.regime == Regime::Degenerate)
    throw ValidationError("model", "l = m with P_l = Q_m needs a different normalization");
  if (epsilons.empty()) throw ValidationError("epsilon", "at least one value required");
  if (horizons.empty()) throw ValidationError("T", "at least one value required");
  const double rate = rate_functional(model, f);
  std::vector<DecayRow> rows;
  for (double eps : epsilons) {
    for (double T : horizons) {
      const auto rep = estimate_is(model, TubeSpec{f, eps, T}, replicas, master_seed, opts);
      DecayRow row;
      row.T = T;
      row.epsilon = eps;
      row.log_prob = rep.log_prob_estimate;
      row.std_error_log = rep.std_error_log;
      row.normalized = rep.normalized_value;
      row.normalized_std_error = rep.std_error_log / psi(c, T);
      row.rate_functional = rate;
      row.psi_exponent = c.psi_exponent;
      row.replicas = replicas;
      row.hits = rep.hits;
      row.ess = rep.effective_sample_size;
      row.seed = master_seed;
      row.flags = rep.flags;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace ldpbdp
