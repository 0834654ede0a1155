#include "ldpbdp/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "ldpbdp/error.hpp"
#include "ldpbdp/rate_functional.hpp"
#include "ldpbdp/rng.hpp"
#include "ldpbdp/stats.hpp"

namespace ldpbdp {

namespace {

constexpr std::size_t kWeightGrid = 10000;

void check_weight(const WeightFunction& g, double T) {
  if (!g.eval) throw ValidationError("g", "weight function must be callable");
  if (!(T > 0.0)) throw ValidationError("T", "must be positive");
  for (std::size_t i = 0; i <= kWeightGrid; ++i) {
    const double s = T * static_cast<double>(i) / static_cast<double>(kWeightGrid);
    const double v = g.eval(s);
    if (!std::isfinite(v)) throw ValidationError("g", fmt::format("g({}) is not finite", s));
    if (v < 0.0) throw ValidationError("g", fmt::format("g({}) = {} is negative", s, v));
  }
}

double grid_inf(const WeightFunction& g, double T) {
  double inf = g.eval(0.0);
  for (std::size_t i = 1; i <= kWeightGrid; ++i)
    inf = std::min(inf, g.eval(T * static_cast<double>(i) / static_cast<double>(kWeightGrid)));
  return inf;
}

// Jump times of a unit-rate Poisson stream on [0, T].
void sample_jump_times(Rng& rng, double T, std::vector<double>& times) {
  times.clear();
  double t = rng.exponential(1.0);
  while (t <= T) {
    times.push_back(t);
    t += rng.exponential(1.0);
  }
}

class MeanVar {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  MonteCarloEstimate result() const {
    MonteCarloEstimate e;
    e.samples = n_;
    e.mean = mean_;
    e.std_error = n_ > 1 ? std::sqrt(m2_ / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0;
    return e;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace

WeightFunction WeightFunction::constant(double c) {
  return {[c](double) { return c; }, fmt::format("{}", c)};
}

WeightFunction WeightFunction::power(double k) {
  return {[k](double s) { return std::pow(s, k); }, k == 1.0 ? "s" : fmt::format("s^{}", k)};
}

bool MonteCarloEstimate::within(double target, double sigmas) const {
  return std::abs(mean - target) <= sigmas * std_error;
}

double integrate_weight(const WeightFunction& g, double T) {
  return T * romberg([&](double u) { return g.eval(u * T); }, (std::size_t{1} << 16) + 1, 1e-12).value;
}

double poisson_product_mean(const WeightFunction& g, int n, double T) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  check_weight(g, T);
  const double integral = integrate_weight(g, T);
  if (integral == 0.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log(integral) - std::lgamma(n + 1.0) - T);
}

double poisson_product_std_error(const WeightFunction& g, int n, double T, std::uint64_t samples) {
  if (samples == 0) throw ValidationError("samples", "must be positive");
  const WeightFunction squared{[&g](double s) {
                                 const double v = g.eval(s);
                                 return v * v;
                               },
                               g.name + "^2"};
  const double mean = poisson_product_mean(g, n, T);
  const double second = poisson_product_mean(squared, n, T);
  return std::sqrt(std::max(second - mean * mean, 0.0) / static_cast<double>(samples));
}

MonteCarloEstimate poisson_product_mean_mc(const WeightFunction& g, int n, double T,
                                           std::uint64_t samples, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  check_weight(g, T);
  MeanVar acc;
  std::vector<double> times;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, i));
    sample_jump_times(rng, T, times);
    double v = 0.0;
    if (times.size() == static_cast<std::size_t>(n)) {
      v = 1.0;
      for (double t : times) v *= g.eval(t);
    }
    acc.add(v);
  }
  return acc.result();
}

GapBoundCheck poisson_product_gap_bound(const WeightFunction& g, int n, double T, double delta,
                                        std::uint64_t samples, std::uint64_t seed) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("Delta", "must lie in (0, 1]");
  check_weight(g, T);
  GapBoundCheck out;
  out.alpha = delta / 2.0 * grid_inf(g, T);
  const double base = integrate_weight(g, T) - T * out.alpha;
  out.rhs = base <= 0.0 ? 0.0
                        : 2.0 / delta *
                              std::exp(static_cast<double>(n) * std::log(base) - std::lgamma(n + 1.0) - T);
  MeanVar acc;
  std::vector<double> times;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, i));
    sample_jump_times(rng, T, times);
    double v = 0.0;
    if (times.size() == static_cast<std::size_t>(n)) {
      double max_gap = T - times.back();
      double prev = 0.0;
      for (double t : times) {
        max_gap = std::max(max_gap, t - prev);
        prev = t;
      }
      if (max_gap > T * delta) {
        v = 1.0;
        for (double t : times) v *= g.eval(t);
      }
    }
    acc.add(v);
  }
  out.lhs = acc.result();
  return out;
}

double poisson_product_total(const WeightFunction& g, double T) {
  check_weight(g, T);
  return std::exp(-T) * std::expm1(integrate_weight(g, T));
}

MonteCarloEstimate poisson_product_total_mc(const WeightFunction& g, double T, std::uint64_t samples,
                                            std::uint64_t seed) {
  check_weight(g, T);
  MeanVar acc;
  std::vector<double> times;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, i));
    sample_jump_times(rng, T, times);
    double v = 0.0;
    if (!times.empty()) {
      v = 1.0;
      for (double t : times) v *= g.eval(t);
    }
    acc.add(v);
  }
  return acc.result();
}

BoundedSumCount count_bounded_sequences(int n, int d) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (d < 1) throw ValidationError("d", "must be >= 1");
  const auto width = static_cast<std::size_t>(2 * d + 1);
  std::vector<BigInt> cur(width, 0);
  std::vector<BigInt> next(width);
  cur[static_cast<std::size_t>(d)] = 1;  // partial sum 0
  for (int step = 0; step < n; ++step) {
    for (std::size_t s = 0; s < width; ++s) {
      next[s] = 0;
      if (s > 0) next[s] += cur[s - 1];
      if (s + 1 < width) next[s] += cur[s + 1];
    }
    std::swap(cur, next);
  }
  BoundedSumCount out{n, d, 0};
  for (const auto& c : cur) out.count += c;
  return out;
}

double log_bounded_fraction(int n, int d) {
  if (n < 1) throw ValidationError("n", "must be >= 1");
  if (d < 1) throw ValidationError("d", "must be >= 1");
  const auto width = static_cast<std::size_t>(2 * d + 1);
  std::vector<double> cur(width, 0.0);
  std::vector<double> next(width);
  cur[static_cast<std::size_t>(d)] = 1.0;
  double log_scale = 0.0;
  for (int step = 0; step < n; ++step) {
    double mass = 0.0;
    for (std::size_t s = 0; s < width; ++s) {
      next[s] = 0.0;
      if (s > 0) next[s] += 0.5 * cur[s - 1];
      if (s + 1 < width) next[s] += 0.5 * cur[s + 1];
      mass += next[s];
    }
    for (auto& v : next) v /= mass;
    log_scale += std::log(mass);
    std::swap(cur, next);
  }
  return log_scale;
}

std::uint64_t count_bounded_sequences_brute(int n, int d) {
  if (n < 1 || n > 30) throw ValidationError("n", "brute force supports 1 <= n <= 30");
  std::uint64_t count = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    int s = 0;
    bool ok = true;
    for (int r = 0; r < n && ok; ++r) {
      s += ((mask >> r) & 1U) ? 1 : -1;
      ok = std::abs(s) <= d;
    }
    count += ok ? 1 : 0;
  }
  return count;
}

SequenceBoundCheck check_sequence_bound(double T, double delta, double beta, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta", "must lie in (0, 1)");
  if (!(beta > 1.0)) throw ValidationError("beta", "must exceed 1");
  if (!(delta > 0.0)) throw ValidationError("Delta", "must be positive");
  SequenceBoundCheck out;
  out.n = static_cast<int>(std::floor(std::pow(T, beta)));
  out.d = static_cast<int>(std::floor(T * delta));
  if (out.n < 1 || out.d < 1) throw ValidationError("T", "T too small for n, d >= 1");
  out.log_fraction = log_bounded_fraction(out.n, out.d);
  out.log_bound = static_cast<double>(out.n + 1) * std::log1p(-theta);
  return out;
}

}  // namespace ldpbdp
