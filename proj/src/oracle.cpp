#include "ldpbdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ldpbdp/error.hpp"

namespace ldpbdp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Largest Poisson mean handled in one uniformization step; keeps e^{-q} normal.
constexpr double kMaxStepMean = 20.0;

struct Work {
  std::vector<double> cur;
  std::vector<double> next;
  std::vector<double> out;
};

// v <- v exp(Q_band dt) on the states of `band`. Returns the truncation error
// bound relative to |v|_1.
double propagate(const TruncatedGenerator& gen, Band band, double dt, std::vector<double>& v,
                 double tolerance, Work& w) {
  if (dt <= 0.0) return 0.0;
  const auto lo = static_cast<std::size_t>(band.lo);
  const auto hi = static_cast<std::size_t>(band.hi);
  double rate = 0.0;
  for (std::size_t x = lo; x <= hi; ++x) rate = std::max(rate, gen.birth[x] + gen.death[x]);
  if (rate == 0.0) return 0.0;

  const auto steps = static_cast<std::size_t>(std::ceil(rate * dt / kMaxStepMean));
  const double q = rate * dt / static_cast<double>(steps);
  const double step_tol = tolerance / static_cast<double>(steps);
  w.cur.assign(v.size(), 0.0);
  w.next.assign(v.size(), 0.0);
  w.out.assign(v.size(), 0.0);
  double err = 0.0;

  for (std::size_t s = 0; s < steps; ++s) {
    double weight = std::exp(-q);
    for (std::size_t x = lo; x <= hi; ++x) {
      w.cur[x] = v[x];
      w.out[x] = weight * v[x];
    }
    for (std::size_t k = 1;; ++k) {
      for (std::size_t y = lo; y <= hi; ++y) {
        double acc = w.cur[y] * (1.0 - (gen.birth[y] + gen.death[y]) / rate);
        if (y > lo) acc += w.cur[y - 1] * gen.birth[y - 1] / rate;
        if (y < hi) acc += w.cur[y + 1] * gen.death[y + 1] / rate;
        w.next[y] = acc;
      }
      std::swap(w.cur, w.next);
      weight *= q / static_cast<double>(k);
      for (std::size_t x = lo; x <= hi; ++x) w.out[x] += weight * w.cur[x];
      const double kk = static_cast<double>(k + 1);
      if (kk > q) {
        const double tail = weight * kk / (kk - q);
        if (tail < step_tol) {
          err += tail;
          break;
        }
      }
    }
    for (std::size_t x = lo; x <= hi; ++x) v[x] = w.out[x];
  }
  return err;
}

}  // namespace

TruncatedGenerator::TruncatedGenerator(const RateModel& model, State cap) : state_cap(cap) {
  if (cap < 1) throw ValidationError("state_cap", "must be >= 1");
  birth.resize(static_cast<std::size_t>(cap) + 1);
  death.resize(static_cast<std::size_t>(cap) + 1);
  for (State x = 0; x <= cap; ++x) {
    const double lam = model.birth(x);
    const double mu = model.death(x);
    if (!std::isfinite(lam) || !std::isfinite(mu) || !(lam > 0.0) || mu < 0.0)
      throw ModelEvaluationError(x, fmt::format("invalid rates lambda={} mu={}", lam, mu));
    birth[static_cast<std::size_t>(x)] = lam;
    death[static_cast<std::size_t>(x)] = mu;
  }
}

double TruncatedGenerator::row_sum(State x, State lo, State hi) const {
  const auto i = static_cast<std::size_t>(x);
  double s = -(birth[i] + death[i]);
  if (x + 1 <= hi && x + 1 <= state_cap) s += birth[i];
  if (x - 1 >= lo && x - 1 >= 0) s += death[i];
  return s;
}

double OracleResult::inner() const { return std::exp(log_inner); }
double OracleResult::outer() const { return std::exp(log_outer); }

double OracleResult::log_midpoint() const {
  if (log_outer == kNegInf) return kNegInf;
  return log_outer + std::log((1.0 + std::exp(log_inner - log_outer)) / 2.0);
}

double taboo_log_probability(const TruncatedGenerator& gen, std::span<const BandSlice> bands,
                             bool use_inner, State start, const OracleOptions& opts,
                             double* truncation_error) {
  std::vector<double> v(static_cast<std::size_t>(gen.state_cap) + 1, 0.0);
  if (start < 0 || start > gen.state_cap) return kNegInf;
  v[static_cast<std::size_t>(start)] = 1.0;
  double log_scale = 0.0;
  double err = 0.0;
  Work work;
  for (const auto& slice : bands) {
    Band b = use_inner ? slice.inner : slice.outer;
    b.lo = std::max<State>(b.lo, 0);
    b.hi = std::min(b.hi, gen.state_cap);
    if (b.empty()) return kNegInf;
    double mass = 0.0;
    for (State x = 0; x <= gen.state_cap; ++x) {
      auto& vx = v[static_cast<std::size_t>(x)];
      if (x < b.lo || x > b.hi) vx = 0.0;
      mass += vx;
    }
    if (mass == 0.0) return kNegInf;
    for (auto& vx : v) vx /= mass;
    log_scale += std::log(mass);
    err += propagate(gen, b, slice.t1 - slice.t0, v, opts.per_slice_tolerance, work) *
           std::exp(log_scale);
  }
  double mass = 0.0;
  for (double vx : v) mass += vx;
  if (truncation_error) *truncation_error = err;
  return mass > 0.0 ? log_scale + std::log(mass) : kNegInf;
}

std::vector<BandSlice> tube_bands(const TubeSpec& tube, std::size_t time_slices, State state_cap,
                                  std::size_t profile_grid) {
  if (time_slices < 1) throw ValidationError("time_slices", "must be >= 1");
  const double T = tube.T;
  const double eps = tube.epsilon;
  const double tol = T * kBoundaryTolerance;
  // The extra zero-length slice pins the state at time T itself.
  std::vector<BandSlice> out(time_slices + 1);
  const double n = static_cast<double>(time_slices);
  for (std::size_t k = 0; k <= time_slices; ++k) {
    const double a = k == time_slices ? 1.0 : static_cast<double>(k) / n;
    const double b = k + 1 >= time_slices ? 1.0 : static_cast<double>(k + 1) / n;
    const ValueRange r = tube.profile.range(a, b, profile_grid);
    // Allowed at time t: T(f(t) - eps) + tol < x < T(f(t) + eps) - tol, the
    // same boundary convention as tube_membership. Both bands are open
    // intervals: inner intersects over the slice, outer unites.
    const double in_lo = T * (r.max + r.slack - eps) + tol;
    const double in_hi = T * (r.min - r.slack + eps) - tol;
    const double out_lo = T * (r.min - r.slack - eps) + tol;
    const double out_hi = T * (r.max + r.slack + eps) - tol;
    BandSlice& s = out[k];
    s.t0 = a * T;
    s.t1 = b * T;
    s.inner = {static_cast<State>(std::floor(in_lo)) + 1, static_cast<State>(std::ceil(in_hi)) - 1};
    s.outer = {static_cast<State>(std::floor(out_lo)) + 1, static_cast<State>(std::ceil(out_hi)) - 1};
    for (Band* band : {&s.inner, &s.outer}) {
      band->lo = std::max<State>(band->lo, 0);
      band->hi = std::min(band->hi, state_cap);
    }
  }
  return out;
}

OracleResult tube_probability_exact(const RateModel& model, const TubeSpec& tube,
                                    std::size_t time_slices, State state_cap,
                                    const OracleOptions& opts) {
  if (!(tube.T > 0.0)) throw ValidationError("T", "must be positive");
  if (!(tube.epsilon > 0.0)) throw ValidationError("epsilon", "must be positive");
  validate_profile(tube.profile);
  const auto bands = tube_bands(tube, time_slices, state_cap);
  const TruncatedGenerator gen(model, state_cap);

  double work = 0.0;
  for (const auto& s : bands) {
    if (s.outer.empty()) continue;
    double rate = 0.0;
    for (State x = s.outer.lo; x <= s.outer.hi; ++x) rate = std::max(rate, gen.exit_rate(x));
    const double q = rate * (s.t1 - s.t0);
    work += (q + 6.0 * std::sqrt(q) + 10.0 * std::ceil(q / kMaxStepMean + 1.0)) *
            static_cast<double>(s.outer.hi - s.outer.lo + 1);
  }
  if (work > opts.work_budget)
    throw ValidationError("time_slices", fmt::format("estimated work {:.3g} exceeds the oracle budget {:.3g}",
                                                     work, opts.work_budget));

  OracleResult res;
  res.time_slices = time_slices;
  for (std::size_t k = 0; k < bands.size(); ++k) {
    if (bands[k].outer.empty()) {
      res.empty_at = static_cast<double>(k) / static_cast<double>(time_slices);
      res.log_inner = kNegInf;
      res.log_outer = kNegInf;
      return res;
    }
  }
  double err_in = 0.0;
  double err_out = 0.0;
  res.log_inner = taboo_log_probability(gen, bands, true, 0, opts, &err_in);
  res.log_outer = taboo_log_probability(gen, bands, false, 0, opts, &err_out);
  res.truncation_error = std::max(err_in, err_out);
  return res;
}

}  // namespace ldpbdp
