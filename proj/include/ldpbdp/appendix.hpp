#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ldpbdp {

using BigInt = boost::multiprecision::cpp_int;

// Non-negative bounded weight function on [0, T].
struct WeightFunction {
  std::function<double(double)> eval;
  std::string name;

  static WeightFunction constant(double c);
  static WeightFunction power(double k);  // g(s) = s^k
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;

  // |mean - target| <= sigmas * std_error (exact equality passes when se = 0).
  bool within(double target, double sigmas = 3.0) const;
};

// int_0^T g(s) ds by Romberg quadrature.
double integrate_weight(const WeightFunction& g, double T);

// E[prod_{i<=n} g(t_i) 1(exactly n jumps)] = (int_0^T g)^n / n! e^{-T} for the
// jump times of a unit-rate Poisson stream on [0, T].
double poisson_product_mean(const WeightFunction& g, int n, double T);
// Exact standard error of the n-sample mean of that product, from its second
// moment (int_0^T g^2)^n / n! e^{-T}.
double poisson_product_std_error(const WeightFunction& g, int n, double T, std::uint64_t samples);
MonteCarloEstimate poisson_product_mean_mc(const WeightFunction& g, int n, double T,
                                           std::uint64_t samples, std::uint64_t seed);

struct GapBoundCheck {
  MonteCarloEstimate lhs;  // product restricted to paths with max gap > T Delta
  double rhs = 0.0;        // (2/Delta) (int g - T alpha)^n / n! e^{-T}
  double alpha = 0.0;      // (Delta / 2) inf g
  bool holds(double sigmas = 3.0) const { return lhs.mean <= rhs + sigmas * lhs.std_error; }
};

// Gaps are tau_1..tau_n between jump times plus tau_{n+1} = T - t_n.
GapBoundCheck poisson_product_gap_bound(const WeightFunction& g, int n, double T, double delta,
                                        std::uint64_t samples, std::uint64_t seed);

// E[prod_{i<=N} g(t_i) 1(N >= 1)] = e^{-T}(exp(int_0^T g) - 1).
double poisson_product_total(const WeightFunction& g, double T);
MonteCarloEstimate poisson_product_total_mc(const WeightFunction& g, double T,
                                            std::uint64_t samples, std::uint64_t seed);

struct BoundedSumCount {
  int n = 0;
  int d = 0;
  BigInt count;
};

// Number of +-1 sequences of length n whose partial sums all satisfy |S_r| <= d.
BoundedSumCount count_bounded_sequences(int n, int d);

// ln(c_d / 2^n) from a probability-normalized DP; stays finite for n ~ 10^4+.
double log_bounded_fraction(int n, int d);

// Exhaustive enumeration over all 2^n sequences (n <= 30).
std::uint64_t count_bounded_sequences_brute(int n, int d);

struct SequenceBoundCheck {
  int n = 0;          // [T^beta]
  int d = 0;          // [T Delta]
  double log_fraction = 0.0;  // ln(c_d / 2^n)
  double log_bound = 0.0;     // (n + 1) ln(1 - theta)
  bool holds() const { return log_fraction >= log_bound; }
};

// c_d >= (1 - theta)^{n+1} 2^n at d = [T Delta], n = [T^beta].
SequenceBoundCheck check_sequence_bound(double T, double delta, double beta, double theta);

}  // namespace ldpbdp
