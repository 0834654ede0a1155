// ldp-bdp: simulation, tube-probability estimation and verification for
// birth-death processes with polynomial rates.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "ldpbdp/config.hpp"
#include "ldpbdp/error.hpp"
#include "ldpbdp/estimators.hpp"
#include "ldpbdp/oracle.hpp"
#include "ldpbdp/process.hpp"
#include "ldpbdp/rate_functional.hpp"
#include "ldpbdp/rng.hpp"
#include "ldpbdp/verification.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ldpbdp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Flags {
  std::string config_file;
  std::string model = "power";
  std::optional<double> c_lambda, l, c_mu, m, P_l, Q_m;
  std::string profile = "linear";
  std::vector<double> epsilon;
  std::vector<double> T;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format = "csv";
  std::string method = "is";
  std::size_t quad_points = kDefaultQuadPoints;
  std::size_t time_slices = 400;
  std::int64_t state_cap = 0;
  std::size_t jump_cap = 1000000;
  std::vector<std::string> only;
  std::uint64_t mc_samples = 100000;
};

// Settings after merging the config file with explicit flags.
struct Resolved {
  json model_spec;
  json profile_spec;
  std::vector<double> epsilon;
  std::vector<double> T;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t quad_points = 0;
  std::size_t time_slices = 0;
  std::int64_t state_cap = 0;
  std::size_t jump_cap = 0;
  std::uint64_t mc_samples = 0;
  std::string digest;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", fmt::format("cannot open '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

std::vector<double> as_list(const json& j, const char* field) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) throw ValidationError(field, "must be a number or list of numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  throw ValidationError(field, "must be a number or list of numbers");
}

bool given(const CLI::App& cmd, const char* name) {
  const auto* opt = cmd.get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

Resolved resolve(const CLI::App& cmd, const Flags& f, const std::string& subcommand) {
  json file = json::object();
  if (!f.config_file.empty()) file = read_json_file(f.config_file);
  auto given = [&cmd](const char* name) { return ::given(cmd, name); };
  Resolved r;

  // Model: flags > file > default power(1, 1, 1, 0).
  json model = file.contains("model") ? file.at("model") : json::object();
  if (given("--model") || !file.contains("model")) {
    if (f.model == "power") {
      model = json{{"family", "power"}, {"c_lambda", 1.0}, {"l", 1.0}, {"c_mu", 1.0}, {"m", 0.0}};
    } else if (!f.model.empty() && f.model.front() == '{') {
      try {
        model = json::parse(f.model);
      } catch (const json::parse_error& e) {
        throw ValidationError("model", e.what());
      }
    } else {
      model = read_json_file(f.model);
    }
  }
  if (f.c_lambda) model["c_lambda"] = *f.c_lambda;
  if (f.l) model["l"] = *f.l;
  if (f.c_mu) model["c_mu"] = *f.c_mu;
  if (f.m) model["m"] = *f.m;
  if (f.P_l) model["P_l"] = *f.P_l;
  if (f.Q_m) model["Q_m"] = *f.Q_m;
  r.model_spec = model;

  if (given("--profile") || !file.contains("profile")) {
    r.profile_spec = f.profile;
    if (!f.profile.empty() && f.profile.front() == '{') {
      try {
        r.profile_spec = json::parse(f.profile);
      } catch (const json::parse_error& e) {
        throw ValidationError("profile", e.what());
      }
    }
  } else {
    r.profile_spec = file.at("profile");
  }

  r.epsilon = !f.epsilon.empty() ? f.epsilon
              : file.contains("epsilon") ? as_list(file.at("epsilon"), "epsilon")
                                         : std::vector<double>{0.5};
  r.T = !f.T.empty() ? f.T : file.contains("T") ? as_list(file.at("T"), "T") : std::vector<double>{5.0};

  auto pick = [&](const char* flag, const char* key, auto flag_value) {
    using V = decltype(flag_value);
    if (given(flag) || !file.contains(key)) return flag_value;
    return file.at(key).template get<V>();
  };
  r.replicas = pick("--replicas", "replicas", f.replicas);
  r.seed = pick("--seed", "seed", f.seed);
  r.quad_points = pick("--quad-points", "quad_points", f.quad_points);
  r.time_slices = pick("--time-slices", "time_slices", f.time_slices);
  r.state_cap = pick("--state-cap", "state_cap", f.state_cap);
  r.jump_cap = pick("--jump-cap", "jump_cap", f.jump_cap);
  r.mc_samples = pick("--mc-samples", "mc_samples", f.mc_samples);

  unsigned threads = f.threads;
  if (!given("--threads")) {
    if (file.contains("threads")) {
      threads = file.at("threads").get<unsigned>();
    } else if (const char* env = std::getenv("LDP_BDP_THREADS")) {
      try {
        threads = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        throw ValidationError("LDP_BDP_THREADS", "must be a positive integer");
      }
    }
  }
  r.threads = threads == 0 ? 1 : threads;

  if (r.replicas < 1) throw ValidationError("replicas", "must be >= 1");
  for (double e : r.epsilon)
    if (!(e > 0.0)) throw ValidationError("epsilon", "must be positive");
  for (double t : r.T)
    if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError("T", "must be positive and finite");

  // Thread count and output location do not affect results, so they stay out
  // of the digest.
  json canonical{{"subcommand", subcommand}, {"model", r.model_spec},       {"profile", r.profile_spec},
                 {"epsilon", r.epsilon},     {"T", r.T},                    {"replicas", r.replicas},
                 {"seed", r.seed},           {"quad_points", r.quad_points}, {"time_slices", r.time_slices},
                 {"state_cap", r.state_cap}, {"jump_cap", r.jump_cap},      {"mc_samples", r.mc_samples},
                 {"method", subcommand == "estimate" ? f.method : ""}};
  r.digest = config_digest(canonical);
  return r;
}

RateModel build_model(const Resolved& r) {
  RateModel model = model_from_json(r.model_spec);
  validate_structure(model);
  return model;
}

std::string header(const Resolved& r) {
  return fmt::format("# tool=ldp-bdp {}\n# config_digest={}\n# master_seed={}\n", kToolVersion, r.digest,
                     r.seed);
}

json provenance(const Resolved& r) {
  return {{"tool", "ldp-bdp"}, {"version", kToolVersion}, {"config_digest", r.digest}, {"master_seed", r.seed}};
}

// Writes to --out when set, stdout otherwise.
void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", out_path));
  out << text;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

const char* kEstimateColumns = "method,T,epsilon,log_prob,stderr,normalized,I_f,psi_exp,replicas,ess,seed";

int cmd_simulate(const CLI::App& cmd, const Flags& f) {
  const Resolved r = resolve(cmd, f, "simulate");
  const RateModel model = build_model(r);
  const fs::path dir = f.out.empty() ? fs::path("paths") : fs::path(f.out);
  fs::create_directories(dir);
  std::ostringstream summary;
  summary << header(r) << "T,replica,status,jumps,final_state,file\n";
  json records = json::array();
  for (double T : r.T) {
    std::uint64_t exploded = 0;
    double jump_sum = 0.0;
    for (std::uint64_t i = 0; i < r.replicas; ++i) {
      const auto sim = simulate_bdp(model, T, derive_seed(r.seed, i), r.jump_cap);
      const std::string name = r.T.size() == 1 ? fmt::format("path_{:06d}.csv", i)
                                               : fmt::format("path_T{}_{:06d}.csv", T, i);
      std::ostringstream csv;
      csv << header(r) << fmt::format("# T={} replica={} status={}\n", num(T), i, to_string(sim.status));
      write_path_csv(csv, sim.path);
      emit((dir / name).string(), csv.str());
      exploded += sim.status == SimStatus::Exploded ? 1 : 0;
      jump_sum += static_cast<double>(sim.path.jump_count());
      summary << fmt::format("{},{},{},{},{},{}\n", num(T), i, to_string(sim.status), sim.path.jump_count(),
                             sim.path.final_state(), name);
    }
    records.push_back({{"T", T},
                       {"replicas", r.replicas},
                       {"mean_jumps", jump_sum / static_cast<double>(r.replicas)},
                       {"explosion_frequency", static_cast<double>(exploded) / static_cast<double>(r.replicas)}});
  }
  emit((dir / "summary.csv").string(), summary.str());
  json doc = provenance(r);
  doc["model"] = r.model_spec;
  doc["runs"] = records;
  emit((dir / "summary.json").string(), doc.dump(2) + "\n");
  std::cerr << fmt::format("wrote {} paths to {}\n", r.replicas * r.T.size(), dir.string());
  return kExitOk;
}

json report_json(const EstimateReport& rep, double rate_value) {
  return {{"method", to_string(rep.method)},
          {"T", rep.T},
          {"epsilon", rep.epsilon},
          {"log_prob_estimate", jnum(rep.log_prob_estimate)},
          {"std_error_log", jnum(rep.std_error_log)},
          {"ci_low_log", jnum(rep.ci_low_log)},
          {"ci_high_log", jnum(rep.ci_high_log)},
          {"replicas", rep.replicas},
          {"hits", rep.hits},
          {"truncated", rep.truncated},
          {"normalized_value", jnum(rep.normalized_value)},
          {"I_f", jnum(rate_value)},
          {"psi_exponent", rep.psi_exponent},
          {"effective_sample_size", jnum(rep.effective_sample_size)},
          {"master_seed", rep.master_seed},
          {"config_digest", rep.config_digest},
          {"flags", rep.flags}};
}

std::string report_csv_row(const EstimateReport& rep, double rate_value) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", to_string(rep.method), num(rep.T), num(rep.epsilon),
                     num(rep.log_prob_estimate), num(rep.std_error_log), num(rep.normalized_value),
                     num(rate_value), num(rep.psi_exponent), rep.replicas, num(rep.effective_sample_size),
                     rep.master_seed);
}

double rate_or_nan(const RateModel& model, const TargetProfile& f, std::size_t quad_points) {
  if (classify(model).regime == Regime::Degenerate) return std::nan("");
  return rate_functional(model, f, quad_points);
}

int cmd_estimate(const CLI::App& cmd, const Flags& f) {
  const Resolved r = resolve(cmd, f, "estimate");
  const RateModel model = build_model(r);
  const TargetProfile profile = profile_from_json(r.profile_spec);
  validate_profile(profile);
  const double rate = rate_or_nan(model, profile, r.quad_points);
  EstimatorOptions eopts;
  eopts.threads = r.threads;
  eopts.jump_cap = r.jump_cap;
  eopts.config_digest = r.digest;

  std::vector<std::string> methods;
  if (f.method == "all")
    methods = {"direct", "is", "oracle"};
  else
    methods = {f.method};

  std::ostringstream csv;
  csv << header(r) << kEstimateColumns << "\n";
  json reports = json::array();
  const auto c = classify(model);
  for (double eps : r.epsilon) {
    for (double T : r.T) {
      const TubeSpec tube{profile, eps, T};
      for (const auto& m : methods) {
        EstimateReport rep;
        json extra;
        if (m == "direct") {
          rep = estimate_direct(model, tube, r.replicas, r.seed, eopts);
        } else if (m == "is") {
          rep = estimate_is(model, tube, r.replicas, r.seed, eopts);
        } else if (m == "oracle") {
          State cap = r.state_cap;
          if (cap <= 0) {
            double fmax = 0.0;
            for (int i = 0; i <= 1000; ++i) fmax = std::max(fmax, profile(i / 1000.0));
            cap = static_cast<State>(std::ceil(T * (fmax + eps))) + 2;
          }
          const auto o = tube_probability_exact(model, tube, r.time_slices, cap);
          rep.method = EstimateMethod::ExactOracle;
          rep.T = T;
          rep.epsilon = eps;
          rep.log_prob_estimate = o.log_midpoint();
          rep.std_error_log = std::isfinite(o.log_inner) ? (o.log_outer - o.log_inner) / 2.0 : std::nan("");
          rep.ci_low_log = o.log_inner;
          rep.ci_high_log = o.log_outer;
          rep.replicas = 1;
          rep.psi_exponent = c.psi_exponent;
          rep.normalized_value = c.regime == Regime::Degenerate ? std::nan("") : -rep.log_prob_estimate / psi(c, T);
          rep.master_seed = r.seed;
          rep.config_digest = r.digest;
          extra = {{"log_inner", jnum(o.log_inner)},
                   {"log_outer", jnum(o.log_outer)},
                   {"time_slices", o.time_slices},
                   {"state_cap", cap},
                   {"truncation_error", o.truncation_error}};
          if (o.empty_at) extra["empty_at"] = *o.empty_at;
        } else {
          throw ValidationError("method", fmt::format("unknown method '{}'", m));
        }
        csv << report_csv_row(rep, rate);
        json j = report_json(rep, rate);
        if (!extra.is_null()) j["oracle"] = extra;
        reports.push_back(std::move(j));
      }
    }
  }
  if (f.format == "json") {
    json doc = provenance(r);
    doc["model"] = r.model_spec;
    doc["profile"] = r.profile_spec;
    doc["reports"] = reports;
    emit(f.out, doc.dump(2) + "\n");
  } else {
    emit(f.out, csv.str());
  }
  return kExitOk;
}

int cmd_rate(const CLI::App& cmd, const Flags& f) {
  const Resolved r = resolve(cmd, f, "rate");
  const RateModel model = build_model(r);
  const TargetProfile profile = profile_from_json(r.profile_spec);
  const auto c = classify(model);
  const bool yule = model.pure_birth();
  const double value = yule ? yule_rate_functional(model, profile, r.quad_points)
                            : rate_functional(model, profile, r.quad_points);
  if (f.format == "json") {
    json doc = provenance(r);
    doc.update({{"regime", to_string(c.regime)}, {"psi_exponent", c.psi_exponent}, {"I_f", value},
                {"pure_birth", yule}});
    emit(f.out, doc.dump(2) + "\n");
  } else {
    emit(f.out, header(r) + "regime,psi_exp,I_f\n" +
                    fmt::format("{},{},{}\n", to_string(c.regime), num(c.psi_exponent), num(value)));
  }
  return kExitOk;
}

int cmd_study(const CLI::App& cmd, const Flags& f) {
  Flags defaults = f;
  if (defaults.T.empty() && !given(cmd, "--T")) defaults.T = {4.0, 8.0, 16.0};
  if (defaults.epsilon.empty() && !given(cmd, "--epsilon")) defaults.epsilon = {0.4, 0.2};
  Resolved r = resolve(cmd, defaults, "study");
  const RateModel model = build_model(r);
  const auto c = classify(model);
  if (c.regime == Regime::Degenerate)
    throw ValidationError("model", "l = m with P_l = Q_m needs a different normalization; study refused");
  const TargetProfile profile = profile_from_json(r.profile_spec);
  EstimatorOptions eopts;
  eopts.threads = r.threads;
  eopts.config_digest = r.digest;
  const auto rows = normalized_decay(model, profile, r.epsilon, r.T, r.replicas, r.seed, eopts);
  if (f.format == "json") {
    json doc = provenance(r);
    doc["regime"] = to_string(c.regime);
    json arr = json::array();
    for (const auto& row : rows)
      arr.push_back({{"T", row.T},
                     {"epsilon", row.epsilon},
                     {"log_prob", jnum(row.log_prob)},
                     {"stderr", jnum(row.std_error_log)},
                     {"normalized", jnum(row.normalized)},
                     {"normalized_stderr", jnum(row.normalized_std_error)},
                     {"I_f", row.rate_functional},
                     {"psi_exp", row.psi_exponent},
                     {"replicas", row.replicas},
                     {"hits", row.hits},
                     {"ess", jnum(row.ess)},
                     {"seed", row.seed},
                     {"flags", row.flags}});
    doc["rows"] = arr;
    emit(f.out, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << header(r) << fmt::format("# regime={}\n", to_string(c.regime)) << kEstimateColumns
        << ",normalized_stderr,hits\n";
    for (const auto& row : rows)
      csv << fmt::format("is,{},{},{},{},{},{},{},{},{},{},{},{}\n", num(row.T), num(row.epsilon), num(row.log_prob),
                         num(row.std_error_log), num(row.normalized), num(row.rate_functional),
                         num(row.psi_exponent), row.replicas, num(row.ess), row.seed,
                         num(row.normalized_std_error), row.hits);
    emit(f.out, csv.str());
  }
  return kExitOk;
}

int cmd_verify(const CLI::App& cmd, const Flags& f) {
  Flags adjusted = f;
  if (!given(cmd, "--seed")) adjusted.seed = VerifyOptions{}.seed;
  const Resolved r = resolve(cmd, adjusted, "verify");
  VerifyOptions opts;
  opts.seed = r.seed;
  opts.mc_samples = r.mc_samples;
  opts.threads = r.threads;
  opts.model = model_from_json(r.model_spec);
  std::vector<std::string> only;
  for (const auto& item : f.only) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) only.push_back(part);
  }
  const auto rows = run_verification(opts, only);
  bool ok = true;
  for (const auto& row : rows) ok = ok && row.pass;
  if (f.format == "json") {
    json doc = provenance(r);
    json arr = json::array();
    for (const auto& row : rows)
      arr.push_back({{"gate", row.gate}, {"check", row.check}, {"computed", jnum(row.computed)},
                     {"bound", jnum(row.bound)}, {"margin", jnum(row.margin)}, {"pass", row.pass}});
    doc["checks"] = arr;
    doc["all_pass"] = ok;
    emit(f.out, doc.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv << header(r);
    write_checks_csv(csv, rows);
    emit(f.out, csv.str());
  }
  return ok ? kExitOk : kExitRuntime;
}

void error_record(const char* kind, const std::string& field, const std::string& message) {
  std::cerr << json{{"error", kind}, {"field", field}, {"message", message}}.dump() << "\n";
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_file, "JSON run configuration; flags override it");
  sub->add_option("--model", f.model, "'power', a JSON model file, or inline JSON");
  sub->add_option("--c-lambda", f.c_lambda, "power family: birth coefficient");
  sub->add_option("--l", f.l, "power family: birth exponent");
  sub->add_option("--c-mu", f.c_mu, "power family: death coefficient");
  sub->add_option("--m", f.m, "power family: death exponent");
  sub->add_option("--P-l", f.P_l, "declared birth asymptotic constant (defaults to c_lambda)");
  sub->add_option("--Q-m", f.Q_m, "declared death asymptotic constant (defaults to c_mu)");
  sub->add_option("--profile", f.profile, "linear | linear:c | power:k | custom-table JSON");
  sub->add_option("--epsilon", f.epsilon, "tube half-width(s)")->delimiter(',');
  sub->add_option("--T", f.T, "horizon(s)")->delimiter(',');
  sub->add_option("--replicas", f.replicas, "Monte Carlo replicas");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--threads", f.threads, "worker threads (env LDP_BDP_THREADS)");
  sub->add_option("--out", f.out, "output file (directory for simulate)");
  sub->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--quad-points", f.quad_points, "quadrature point budget");
  sub->add_option("--time-slices", f.time_slices, "oracle time slices");
  sub->add_option("--state-cap", f.state_cap, "oracle state cap (0 = automatic)");
  sub->add_option("--jump-cap", f.jump_cap, "jump cap for birth-death simulation");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birth-death process tube probabilities and large-deviation checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Flags f;
  auto* simulate = app.add_subcommand("simulate", "sample birth-death paths to CSV");
  auto* estimate = app.add_subcommand("estimate", "estimate tube probabilities");
  auto* rate = app.add_subcommand("rate", "evaluate the rate functional");
  auto* study = app.add_subcommand("study", "normalized log-probability over a T ladder");
  auto* verify = app.add_subcommand("verify", "run the identity and counting-bound gates");
  for (auto* sub : {simulate, estimate, rate, study, verify}) add_common(sub, f);
  estimate->add_option("--method", f.method, "direct | is | oracle | all")
      ->check(CLI::IsMember({"direct", "is", "oracle", "all"}));
  verify->add_option("--only", f.only, "run only these gates (comma separated)");
  verify->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record("validation", "arguments", e.what());
    return kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(*simulate, f);
    if (*estimate) return cmd_estimate(*estimate, f);
    if (*rate) return cmd_rate(*rate, f);
    if (*study) return cmd_study(*study, f);
    if (*verify) return cmd_verify(*verify, f);
  } catch (const ValidationError& e) {
    error_record("validation", e.field(), e.what());
    return kExitValidation;
  } catch (const json::exception& e) {
    error_record("validation", "config", e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    error_record("runtime", "", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
