#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ldpbdp {

using State = std::int64_t;

// Declared large-x behaviour: lambda(x) ~ P_l x^l, mu(x) ~ Q_m x^m.
// Q_m == 0 marks a pure-birth model (mu identically zero).
struct Asymptotics {
  double P_l = 1.0;
  double l = 0.0;
  double Q_m = 1.0;
  double m = 0.0;
};

// Birth/death rates on the non-negative integers. Rates at negative states are
// zero: those states are outside the process' state space.
class RateModel {
 public:
  using RateFn = std::function<double(State)>;

  RateModel(RateFn birth, RateFn death, Asymptotics asymptotics, std::string description = {});

  // lambda(x) = c_lambda (1 + x)^l, mu(x) = c_mu x^m for x >= 1, mu(0) = 0.
  // Declared P_l = c_lambda, Q_m = c_mu.
  static RateModel power(double c_lambda, double l, double c_mu, double m);

  // Tabulated rates for x < size, power tail beyond. lambda and mu must have
  // equal length; mu[0] must be zero.
  static RateModel table(std::vector<double> lambda, std::vector<double> mu, Asymptotics tail);

  double birth(State x) const { return x < 0 ? 0.0 : birth_(x); }
  double death(State x) const { return x <= 0 ? 0.0 : death_(x); }
  double total(State x) const { return birth(x) + death(x); }

  const Asymptotics& asymptotics() const noexcept { return asymptotics_; }
  bool pure_birth() const noexcept { return asymptotics_.Q_m == 0.0; }
  const std::string& description() const noexcept { return description_; }

  // Copy with the declared asymptotics replaced; the exact rates are untouched.
  RateModel with_asymptotics(Asymptotics a) const;

 private:
  RateFn birth_;
  RateFn death_;
  Asymptotics asymptotics_;
  std::string description_;
};

struct ModelCheckOptions {
  std::vector<State> validation_points{1000, 10000, 100000};
  double tolerance = 0.05;
  State structural_probe = 1000;  // states 0..probe are checked for sign constraints
};

struct ModelIssue {
  std::string gate;   // "structure", "exponents", or "asymptotics"
  std::string field;
  std::string message;
};

// Lists every violated model invariant. Empty result means the model is valid.
std::vector<ModelIssue> check_model(const RateModel& model, const ModelCheckOptions& opts = {});

// Throws ValidationError for structural problems only (signs of rates,
// parameter ranges). Simulation needs nothing more.
void validate_structure(const RateModel& model, const ModelCheckOptions& opts = {});

// Right-continuous +-1 step path on [0, horizon].
class JumpPath {
 public:
  JumpPath() = default;
  JumpPath(double horizon, std::vector<double> jump_times, std::vector<int> jump_signs,
           State start_state = 0);

  double horizon() const noexcept { return horizon_; }
  State start_state() const noexcept { return start_; }
  std::size_t jump_count() const noexcept { return times_.size(); }
  std::span<const double> jump_times() const noexcept { return times_; }
  std::span<const int> jump_signs() const noexcept { return signs_; }

  // State after the first i jumps; i = 0 gives the start state.
  State state_after(std::size_t i) const;
  State final_state() const { return state_after(jump_count()); }
  State state_at(double t) const;

  // Every prefix state is >= 0.
  bool non_negative() const;

 private:
  double horizon_ = 0.0;
  std::vector<double> times_;
  std::vector<int> signs_;
  State start_ = 0;
};

enum class SimStatus { Completed, Exploded, Truncated };

const char* to_string(SimStatus s);

struct SimOutcome {
  JumpPath path;
  SimStatus status = SimStatus::Completed;
};

struct SimOptions {
  State start_state = 0;
  double wall_clock_budget_s = 0.0;  // 0 disables the budget
};

// Exact event-driven sample of the birth-death process on [0, T].
SimOutcome simulate_bdp(const RateModel& model, double T, std::uint64_t seed, std::size_t jump_cap,
                        const SimOptions& opts = {});

// Unit-rate symmetric +-1 walk on the integers, started at 0.
SimOutcome simulate_reference(double T, std::uint64_t seed, std::size_t jump_cap);

// Jump cap for reference-walk replicas: T + 20 sqrt(T) + 1000.
std::size_t reference_jump_cap(double T);

// xi_T(t) = xi(tT) / T on [0, 1].
struct ScaledPath {
  std::vector<double> knots;   // 0 followed by rescaled jump times
  std::vector<double> values;  // value on [knots[i], knots[i+1]), last one up to 1
  double value_at(double t) const;
};

ScaledPath rescale(const JumpPath& path);

void write_path_csv(std::ostream& out, const JumpPath& path);
JumpPath read_path_csv(std::istream& in, double horizon, State start_state = 0);

}  // namespace ldpbdp
