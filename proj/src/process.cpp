#include "ldpbdp/process.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ldpbdp/error.hpp"
#include "ldpbdp/rng.hpp"

namespace ldpbdp {

RateModel::RateModel(RateFn birth, RateFn death, Asymptotics asymptotics, std::string description)
    : birth_(std::move(birth)),
      death_(std::move(death)),
      asymptotics_(asymptotics),
      description_(std::move(description)) {
  if (!birth_ || !death_) throw ValidationError("model", "rate functions must be callable");
}

RateModel RateModel::power(double c_lambda, double l, double c_mu, double m) {
  if (!(c_lambda > 0.0) || !std::isfinite(c_lambda))
    throw ValidationError("c_lambda", "must be positive and finite");
  if (!(c_mu >= 0.0) || !std::isfinite(c_mu))
    throw ValidationError("c_mu", "must be non-negative and finite");
  if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("l", "must be >= 0");
  if (!(m >= 0.0) || !std::isfinite(m)) throw ValidationError("m", "must be >= 0");
  auto birth = [c_lambda, l](State x) {
    return l == 0.0 ? c_lambda : c_lambda * std::pow(1.0 + static_cast<double>(x), l);
  };
  auto death = [c_mu, m](State x) {
    if (x < 1) return 0.0;
    return m == 0.0 ? c_mu : c_mu * std::pow(static_cast<double>(x), m);
  };
  return RateModel(birth, death, Asymptotics{c_lambda, l, c_mu, m},
                   fmt::format("power(c_lambda={}, l={}, c_mu={}, m={})", c_lambda, l, c_mu, m));
}

RateModel RateModel::table(std::vector<double> lambda, std::vector<double> mu, Asymptotics tail) {
  if (lambda.size() != mu.size()) throw ValidationError("mu", "table length must match lambda");
  if (lambda.empty()) throw ValidationError("lambda", "table must not be empty");
  if (mu[0] != 0.0) throw ValidationError("mu", "mu[0] must be 0");
  if (!(tail.P_l > 0.0)) throw ValidationError("tail.c_lambda", "must be positive");
  if (!(tail.Q_m >= 0.0)) throw ValidationError("tail.c_mu", "must be non-negative");
  if (!(tail.l >= 0.0)) throw ValidationError("tail.l", "must be >= 0");
  if (!(tail.m >= 0.0)) throw ValidationError("tail.m", "must be >= 0");
  const auto n = static_cast<State>(lambda.size());
  auto birth = [lambda = std::move(lambda), n, tail](State x) {
    if (x < n) return lambda[static_cast<std::size_t>(x)];
    return tail.P_l * std::pow(1.0 + static_cast<double>(x), tail.l);
  };
  auto death = [mu = std::move(mu), n, tail](State x) {
    if (x < n) return mu[static_cast<std::size_t>(x)];
    return tail.Q_m * std::pow(static_cast<double>(x), tail.m);
  };
  return RateModel(birth, death, tail, fmt::format("table(size={})", n));
}

RateModel RateModel::with_asymptotics(Asymptotics a) const {
  return RateModel(birth_, death_, a, description_);
}

std::vector<ModelIssue> check_model(const RateModel& model, const ModelCheckOptions& opts) {
  std::vector<ModelIssue> issues;
  const auto& a = model.asymptotics();
  auto add = [&](const char* gate, std::string field, std::string msg) {
    issues.push_back({gate, std::move(field), std::move(msg)});
  };

  if (!(a.P_l > 0.0) || !std::isfinite(a.P_l)) add("structure", "P_l", "must be positive");
  if (!(a.Q_m >= 0.0) || !std::isfinite(a.Q_m)) add("structure", "Q_m", "must be non-negative");
  if (!(a.l >= 0.0) || !std::isfinite(a.l)) add("structure", "l", "must be >= 0");
  if (!(a.m >= 0.0) || !std::isfinite(a.m)) add("structure", "m", "must be >= 0");

  if (model.death(0) != 0.0) add("structure", "mu", "mu(0) must be 0");
  for (State x = 0; x <= opts.structural_probe; ++x) {
    const double lam = model.birth(x);
    if (!(lam > 0.0) || !std::isfinite(lam)) {
      add("structure", "lambda", fmt::format("lambda({}) = {} is not positive", x, lam));
      break;
    }
  }
  for (State x = 1; x <= opts.structural_probe; ++x) {
    const double mu = model.death(x);
    const bool ok = model.pure_birth() ? mu == 0.0 : (mu > 0.0 && std::isfinite(mu));
    if (!ok) {
      add("structure", "mu",
          fmt::format("mu({}) = {} violates {}", x, mu,
                      model.pure_birth() ? "pure-birth mu == 0" : "mu(x) > 0 for x >= 1"));
      break;
    }
  }

  if (!(std::max(a.l, a.m) > 0.0)) add("exponents", "l", "max(l, m) must be positive");

  for (State x : opts.validation_points) {
    const double xd = static_cast<double>(x);
    const double rl = model.birth(x) / (a.P_l * std::pow(xd, a.l));
    if (!(std::abs(rl - 1.0) < opts.tolerance))
      add("asymptotics", "P_l",
          fmt::format("lambda({})/(P_l x^l) = {} deviates from 1 by more than {}", x, rl,
                      opts.tolerance));
    if (!model.pure_birth()) {
      const double rm = model.death(x) / (a.Q_m * std::pow(xd, a.m));
      if (!(std::abs(rm - 1.0) < opts.tolerance))
        add("asymptotics", "Q_m",
            fmt::format("mu({})/(Q_m x^m) = {} deviates from 1 by more than {}", x, rm,
                        opts.tolerance));
    }
  }
  return issues;
}

void validate_structure(const RateModel& model, const ModelCheckOptions& opts) {
  for (const auto& issue : check_model(model, opts))
    if (issue.gate == "structure") throw ValidationError(issue.field, issue.message);
}

JumpPath::JumpPath(double horizon, std::vector<double> jump_times, std::vector<int> jump_signs,
                   State start_state)
    : horizon_(horizon), times_(std::move(jump_times)), signs_(std::move(jump_signs)),
      start_(start_state) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_))
    throw ValidationError("horizon", "must be positive and finite");
  if (times_.size() != signs_.size())
    throw ValidationError("jump_signs", "must match jump_times one-to-one");
  double prev = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!(times_[i] > prev) || times_[i] > horizon_)
      throw ValidationError("jump_times",
                            fmt::format("jump {} at {} breaks 0 < t_1 < ... <= T", i, times_[i]));
    if (signs_[i] != 1 && signs_[i] != -1)
      throw ValidationError("jump_signs", fmt::format("jump {} has sign {}", i, signs_[i]));
    prev = times_[i];
  }
}

State JumpPath::state_after(std::size_t i) const {
  State x = start_;
  for (std::size_t j = 0; j < i && j < signs_.size(); ++j) x += signs_[j];
  return x;
}

State JumpPath::state_at(double t) const {
  const auto k = std::upper_bound(times_.begin(), times_.end(), t) - times_.begin();
  return state_after(static_cast<std::size_t>(k));
}

bool JumpPath::non_negative() const {
  State x = start_;
  if (x < 0) return false;
  for (int s : signs_) {
    x += s;
    if (x < 0) return false;
  }
  return true;
}

const char* to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Completed: return "completed";
    case SimStatus::Exploded: return "exploded";
    case SimStatus::Truncated: return "truncated";
  }
  return "unknown";
}

SimOutcome simulate_bdp(const RateModel& model, double T, std::uint64_t seed, std::size_t jump_cap,
                        const SimOptions& opts) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "must be positive and finite");
  if (jump_cap == 0) throw ValidationError("jump_cap", "must be positive");
  if (opts.start_state < 0) throw ValidationError("start_state", "must be >= 0");

  Rng rng(seed);
  std::vector<double> times;
  std::vector<int> signs;
  SimStatus status = SimStatus::Completed;
  const auto started = std::chrono::steady_clock::now();

  State x = opts.start_state;
  double t = 0.0;
  for (;;) {
    const double lam = model.birth(x);
    const double mu = model.death(x);
    const double h = lam + mu;
    if (!std::isfinite(h) || !(lam > 0.0) || mu < 0.0)
      throw ModelEvaluationError(x, fmt::format("invalid rates lambda={} mu={}", lam, mu));
    const double t_next = t + rng.exponential(h);
    if (t_next > T) break;
    // A clock that no longer advances in double precision has hit an
    // accumulation point as far as this simulation can tell.
    if (times.size() >= jump_cap || !(t_next > t)) {
      status = SimStatus::Exploded;
      break;
    }
    const int sign = rng.uniform() * h < lam ? 1 : -1;
    t = t_next;
    times.push_back(t);
    signs.push_back(sign);
    x += sign;
    if (opts.wall_clock_budget_s > 0.0 && (times.size() & 4095U) == 0) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
      if (spent.count() > opts.wall_clock_budget_s) {
        status = SimStatus::Truncated;
        break;
      }
    }
  }
  return {JumpPath(T, std::move(times), std::move(signs), opts.start_state), status};
}

SimOutcome simulate_reference(double T, std::uint64_t seed, std::size_t jump_cap) {
  if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("T", "must be positive and finite");
  if (jump_cap == 0) throw ValidationError("jump_cap", "must be positive");
  Rng rng(seed);
  std::vector<double> times;
  std::vector<int> signs;
  SimStatus status = SimStatus::Completed;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(1.0);
    if (t > T) break;
    if (times.size() >= jump_cap) {
      status = SimStatus::Truncated;
      break;
    }
    times.push_back(t);
    signs.push_back(rng.coin() ? 1 : -1);
  }
  return {JumpPath(T, std::move(times), std::move(signs), 0), status};
}

std::size_t reference_jump_cap(double T) {
  return static_cast<std::size_t>(std::ceil(T + 20.0 * std::sqrt(T) + 1000.0));
}

double ScaledPath::value_at(double t) const {
  const auto k = std::upper_bound(knots.begin(), knots.end(), t) - knots.begin();
  return values[static_cast<std::size_t>(std::max<std::ptrdiff_t>(k, 1) - 1)];
}

ScaledPath rescale(const JumpPath& path) {
  const double T = path.horizon();
  ScaledPath out;
  out.knots.reserve(path.jump_count() + 1);
  out.values.reserve(path.jump_count() + 1);
  State x = path.start_state();
  out.knots.push_back(0.0);
  out.values.push_back(static_cast<double>(x) / T);
  const auto times = path.jump_times();
  const auto signs = path.jump_signs();
  for (std::size_t i = 0; i < times.size(); ++i) {
    x += signs[i];
    out.knots.push_back(times[i] / T);
    out.values.push_back(static_cast<double>(x) / T);
  }
  return out;
}

void write_path_csv(std::ostream& out, const JumpPath& path) {
  out << "time,sign\n";
  const auto times = path.jump_times();
  const auto signs = path.jump_signs();
  for (std::size_t i = 0; i < times.size(); ++i) out << fmt::format("{:.17g},{}\n", times[i], signs[i]);
}

JumpPath read_path_csv(std::istream& in, double horizon, State start_state) {
  std::vector<double> times;
  std::vector<int> signs;
  std::string line;
  bool header_seen = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("time,sign", 0) != 0)
        throw ValidationError("path_csv", "expected header 'time,sign'");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    double t = 0.0;
    char comma = 0;
    int s = 0;
    if (!(row >> t >> comma >> s) || comma != ',')
      throw ValidationError("path_csv", fmt::format("malformed row at line {}", lineno));
    times.push_back(t);
    signs.push_back(s);
  }
  return JumpPath(horizon, std::move(times), std::move(signs), start_state);
}

}  // namespace ldpbdp
