#include "ldpbdp/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "ldpbdp/appendix.hpp"
#include "ldpbdp/error.hpp"
#include "ldpbdp/estimators.hpp"
#include "ldpbdp/measure.hpp"
#include "ldpbdp/oracle.hpp"
#include "ldpbdp/rate_functional.hpp"
#include "ldpbdp/rng.hpp"

namespace ldpbdp {

namespace {

CheckResult sigma_check(std::string gate, std::string check, const MonteCarloEstimate& mc,
                        double target, double sigmas = 3.0) {
  const double allowed = sigmas * mc.std_error;
  const double diff = std::abs(mc.mean - target);
  return {std::move(gate), std::move(check), mc.mean, target, allowed - diff, diff <= allowed};
}

std::vector<CheckResult> gate_model(const VerifyOptions& opts) {
  const RateModel model = opts.model ? *opts.model : RateModel::power(1.0, 1.0, 1.0, 0.0);
  const ModelCheckOptions mopts;
  std::vector<CheckResult> rows;
  const auto issues = check_model(model, mopts);
  const auto& a = model.asymptotics();
  for (State x : mopts.validation_points) {
    const double xd = static_cast<double>(x);
    const double dl = std::abs(model.birth(x) / (a.P_l * std::pow(xd, a.l)) - 1.0);
    rows.push_back({"model", fmt::format("lambda_ratio_x={}", x), dl, mopts.tolerance,
                    mopts.tolerance - dl, dl < mopts.tolerance});
    if (!model.pure_birth()) {
      const double dm = std::abs(model.death(x) / (a.Q_m * std::pow(xd, a.m)) - 1.0);
      rows.push_back({"model", fmt::format("mu_ratio_x={}", x), dm, mopts.tolerance,
                      mopts.tolerance - dm, dm < mopts.tolerance});
    }
  }
  std::size_t structural = 0;
  for (const auto& i : issues) structural += i.gate != "asymptotics" ? 1 : 0;
  rows.push_back({"model", "structure_and_exponents", static_cast<double>(structural), 0.0,
                  -static_cast<double>(structural), structural == 0});
  return rows;
}

std::vector<CheckResult> gate_density(const VerifyOptions& opts) {
  const std::vector<RateModel> models{RateModel::power(1.0, 1.0, 1.0, 0.0),
                                      RateModel::power(4.0, 1.0, 1.0, 1.0),
                                      RateModel::power(1.0, 0.0, 3.0, 2.0)};
  const std::vector<double> horizons{1.0, 5.0, 20.0};
  constexpr std::uint64_t kPaths = 10000;
  double worst = 0.0;
  std::uint64_t mismatched_inf = 0;
  std::uint64_t finite = 0;
  for (std::uint64_t i = 0; i < kPaths; ++i) {
    const auto& model = models[i % models.size()];
    const double T = horizons[(i / models.size()) % horizons.size()];
    const auto sim = simulate_reference(T, derive_seed(opts.seed, i), reference_jump_cap(T));
    const double direct = log_density(model, sim.path);
    const double assembled = log_weight(compute_functionals(model, sim.path), T);
    if (std::isinf(direct) || std::isinf(assembled)) {
      mismatched_inf += direct == assembled ? 0 : 1;
      continue;
    }
    ++finite;
    const double scale = std::max({std::abs(direct), std::abs(assembled), 1e-300});
    worst = std::max(worst, std::abs(direct - assembled) / scale);
  }
  constexpr double kTol = 1e-10;
  return {{"density", fmt::format("max_rel_diff_over_{}_finite_paths", finite), worst, kTol,
           kTol - worst, worst <= kTol},
          {"density", "zero_density_agreement", static_cast<double>(mismatched_inf), 0.0,
           -static_cast<double>(mismatched_inf), mismatched_inf == 0}};
}

std::vector<CheckResult> gate_unbiased(const VerifyOptions& opts) {
  const RateModel model = RateModel::power(1.0, 1.0, 1.0, 0.0);
  constexpr double T = 1.0;
  std::vector<CheckResult> rows;
  for (int k = 1; k <= 3; ++k) {
    double sum = 0.0;
    double sum_sq = 0.0;
    const auto n = opts.mc_samples;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto sim = simulate_reference(T, derive_seed(opts.seed + static_cast<std::uint64_t>(k), i),
                                          reference_jump_cap(T));
      const auto& p = sim.path;
      if (p.jump_count() != static_cast<std::size_t>(k)) continue;
      const auto signs = p.jump_signs();
      if (!std::all_of(signs.begin(), signs.end(), [](int s) { return s > 0; })) continue;
      const double w = std::exp(log_density(model, p));
      sum += w;
      sum_sq += w * w;
    }
    const double nn = static_cast<double>(n);
    MonteCarloEstimate mc;
    mc.samples = n;
    mc.mean = sum / nn;
    mc.std_error = std::sqrt(std::max(sum_sq / nn - mc.mean * mc.mean, 0.0) / (nn - 1.0));
    rows.push_back(sigma_check("unbiased", fmt::format("all_up_k={}_T=1", k), mc,
                               all_up_probability(model, k, T)));
  }
  return rows;
}

std::vector<CheckResult> gate_rate(const VerifyOptions&) {
  const auto f = TargetProfile::linear();
  struct Case {
    const char* name;
    RateModel model;
    double expected;
  };
  const std::vector<Case> cases{{"birth_dominant_P2", RateModel::power(2.0, 1.0, 1.0, 0.0), 1.0},
                                {"balanced_P4_Q1", RateModel::power(4.0, 1.0, 1.0, 1.0), 0.5},
                                {"death_dominant_Q3", RateModel::power(1.0, 0.0, 3.0, 2.0), 1.0}};
  std::vector<CheckResult> rows;
  constexpr double kTol = 1e-9;
  for (const auto& c : cases) {
    const double v = rate_functional(c.model, f);
    const double rel = std::abs(v - c.expected) / c.expected;
    rows.push_back({"rate", c.name, v, c.expected, kTol - rel, rel <= kTol});
  }
  return rows;
}

std::vector<CheckResult> gate_oracle(const VerifyOptions& opts) {
  const RateModel model = RateModel::power(1.0, 1.0, 1.0, 0.0);
  const TubeSpec tube{TargetProfile::linear(), 0.5, 2.0};
  const auto coarse = tube_probability_exact(model, tube, 200, 64);
  const auto fine = tube_probability_exact(model, tube, 400, 64);
  const double gap_coarse = coarse.outer() - coarse.inner();
  const double gap_fine = fine.outer() - fine.inner();
  EstimatorOptions eopts;
  eopts.threads = opts.threads;
  const auto direct = estimate_direct(model, tube, opts.mc_samples, opts.seed, eopts);
  const double p = direct.probability();
  const double se = direct.std_error();
  const double lo = fine.inner() - 3.0 * se;
  const double hi = fine.outer() + 3.0 * se;
  return {{"oracle", "gap_shrinks_200_to_400_slices", gap_fine, gap_coarse, gap_coarse - gap_fine,
           gap_fine < gap_coarse},
          {"oracle", "direct_mc_in_bracket_T=2", p, fine.inner(), std::min(p - lo, hi - p),
           p >= lo && p <= hi}};
}

std::vector<CheckResult> gate_lemma41(const VerifyOptions& opts) {
  const std::vector<WeightFunction> gs{WeightFunction::constant(1.0), WeightFunction::power(1.0),
                                       WeightFunction::power(2.0)};
  std::vector<CheckResult> rows;
  std::uint64_t stream = 0;
  for (const auto& g : gs) {
    for (double T : {1.0, 2.0, 4.0}) {
      for (int n = 1; n <= 6; ++n) {
        auto mc = poisson_product_mean_mc(g, n, T, opts.mc_samples, opts.seed + (++stream));
        // The sample spread of a rare, skewed product runs low; judge against the exact one.
        mc.std_error = poisson_product_std_error(g, n, T, opts.mc_samples);
        rows.push_back(sigma_check("lemma41", fmt::format("g={}_T={}_n={}", g.name, T, n), mc,
                                   poisson_product_mean(g, n, T)));
      }
    }
  }
  return rows;
}

std::vector<CheckResult> gate_lemma41_gap(const VerifyOptions& opts) {
  struct Case {
    WeightFunction g;
    int n;
    double T;
    double delta;
  };
  const std::vector<Case> cases{{WeightFunction::constant(1.0), 6, 4.0, 0.5},
                                {WeightFunction::constant(1.0), 3, 2.0, 0.25},
                                {WeightFunction::power(1.0), 4, 4.0, 0.5},
                                {WeightFunction::constant(1.0), 8, 4.0, 1.0},
                                {WeightFunction::constant(0.0), 2, 2.0, 0.5}};
  std::vector<CheckResult> rows;
  std::uint64_t stream = 100;
  for (const auto& c : cases) {
    const auto chk = poisson_product_gap_bound(c.g, c.n, c.T, c.delta, opts.mc_samples, opts.seed + (++stream));
    const double allowed = chk.rhs + 3.0 * chk.lhs.std_error;
    rows.push_back({"lemma41gap", fmt::format("g={}_T={}_n={}_Delta={}", c.g.name, c.T, c.n, c.delta),
                    chk.lhs.mean, chk.rhs, allowed - chk.lhs.mean, chk.holds()});
  }
  return rows;
}

std::vector<CheckResult> gate_remark42(const VerifyOptions& opts) {
  const std::vector<std::pair<WeightFunction, double>> cases{{WeightFunction::constant(1.0), 1.0},
                                                             {WeightFunction::constant(2.0), 1.0},
                                                             {WeightFunction::constant(0.0), 1.0},
                                                             {WeightFunction::power(1.0), 2.0},
                                                             {WeightFunction::power(2.0), 1.0}};
  std::vector<CheckResult> rows;
  std::uint64_t stream = 200;
  for (const auto& [g, T] : cases) {
    const auto mc = poisson_product_total_mc(g, T, opts.mc_samples, opts.seed + (++stream));
    rows.push_back(sigma_check("remark42", fmt::format("g={}_T={}", g.name, T), mc,
                               poisson_product_total(g, T)));
  }
  return rows;
}

std::vector<CheckResult> gate_lemma43(const VerifyOptions&) {
  std::vector<CheckResult> rows;
  std::uint64_t mismatches = 0;
  for (int n = 1; n <= 20; ++n) {
    for (int d = 1; d <= 5; ++d) {
      const auto dp = count_bounded_sequences(n, d);
      if (dp.count != count_bounded_sequences_brute(n, d)) ++mismatches;
    }
  }
  rows.push_back({"lemma43", "dp_equals_bruteforce_n<=20_d<=5", static_cast<double>(mismatches), 0.0,
                  -static_cast<double>(mismatches), mismatches == 0});
  for (double T : {50.0, 100.0}) {
    const auto chk = check_sequence_bound(T, 0.2, 1.5, 0.1);
    rows.push_back({"lemma43", fmt::format("bound_T={}_n={}_d={}", T, chk.n, chk.d), chk.log_fraction,
                    chk.log_bound, chk.log_fraction - chk.log_bound, chk.holds()});
  }
  return rows;
}

}  // namespace

const std::vector<std::string>& gate_names() {
  static const std::vector<std::string> names{"model",   "density",    "unbiased", "rate",   "oracle",
                                              "lemma41", "lemma41gap", "remark42", "lemma43"};
  return names;
}

std::vector<CheckResult> run_gate(const std::string& gate, const VerifyOptions& opts) {
  if (gate == "model") return gate_model(opts);
  if (gate == "density") return gate_density(opts);
  if (gate == "unbiased") return gate_unbiased(opts);
  if (gate == "rate") return gate_rate(opts);
  if (gate == "oracle") return gate_oracle(opts);
  if (gate == "lemma41") return gate_lemma41(opts);
  if (gate == "lemma41gap") return gate_lemma41_gap(opts);
  if (gate == "remark42") return gate_remark42(opts);
  if (gate == "lemma43") return gate_lemma43(opts);
  throw ValidationError("only", fmt::format("unknown gate '{}'", gate));
}

std::vector<CheckResult> run_verification(const VerifyOptions& opts, const std::vector<std::string>& only) {
  std::vector<CheckResult> rows;
  for (const auto& g : only.empty() ? gate_names() : only) {
    auto part = run_gate(g, opts);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

double all_up_probability(const RateModel& model, int k, double T) {
  if (k < 0) throw ValidationError("k", "must be >= 0");
  std::vector<double> h(static_cast<std::size_t>(k) + 1);
  double log_birth = 0.0;
  for (int j = 0; j <= k; ++j) {
    h[static_cast<std::size_t>(j)] = model.total(j);
    if (j < k) log_birth += std::log(model.birth(j));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    double denom = 1.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (i == j) continue;
      if (h[i] == h[j]) throw ValidationError("model", "exit rates h(0..k) must be distinct");
      denom *= h[i] - h[j];
    }
    sum += std::exp(-h[j] * T) / denom;
  }
  return std::exp(log_birth) * sum;
}

void write_checks_csv(std::ostream& out, const std::vector<CheckResult>& rows) {
  out << "gate,check,computed,bound,margin,pass\n";
  for (const auto& r : rows)
    out << fmt::format("{},{},{:.12g},{:.12g},{:.6g},{}\n", r.gate, r.check, r.computed, r.bound,
                       r.margin, r.pass ? "pass" : "FAIL");
}

}  // namespace ldpbdp
