#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldpbdp/process.hpp"

namespace ldpbdp {

// One row of the verification report. margin >= 0 means the check passed with
// that much room (in the units of `computed`).
struct CheckResult {
  std::string gate;
  std::string check;
  double computed = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct VerifyOptions {
  std::uint64_t seed = 20190611;
  std::uint64_t mc_samples = 100000;
  unsigned threads = 1;
  // Model audited by the "model" gate; defaults to power(1, 1, 1, 0).
  std::optional<RateModel> model;
};

// Gate names, in execution order.
const std::vector<std::string>& gate_names();

std::vector<CheckResult> run_gate(const std::string& gate, const VerifyOptions& opts);

// Runs `only` (or every gate when empty).
std::vector<CheckResult> run_verification(const VerifyOptions& opts,
                                          const std::vector<std::string>& only = {});

// P(the first k jumps are all +1 and there are exactly k jumps on [0, T]) for
// the birth-death process from 0, by the hypoexponential convolution formula.
// Needs distinct exit rates h(0), ..., h(k).
double all_up_probability(const RateModel& model, int k, double T);

void write_checks_csv(std::ostream& out, const std::vector<CheckResult>& rows);

}  // namespace ldpbdp
