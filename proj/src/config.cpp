#include "ldpbdp/config.hpp"

#include <fmt/format.h>

#include "ldpbdp/error.hpp"

namespace ldpbdp {

namespace {

using nlohmann::json;

double number(const json& j, const char* key, const std::string& field) {
  if (!j.contains(key)) throw ValidationError(field, "missing");
  if (!j.at(key).is_number()) throw ValidationError(field, "must be a number");
  return j.at(key).get<double>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& field) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ValidationError(field, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ValidationError(field, "must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

RateModel model_from_json(const json& spec) {
  if (!spec.is_object()) throw ValidationError("model", "must be a JSON object");
  const std::string family = spec.value("family", "power");
  RateModel model = [&] {
    if (family == "power") {
      return RateModel::power(number(spec, "c_lambda", "c_lambda"), number(spec, "l", "l"),
                              number(spec, "c_mu", "c_mu"), number(spec, "m", "m"));
    }
    if (family == "table") {
      if (!spec.contains("tail")) throw ValidationError("tail", "missing");
      const auto& tail = spec.at("tail");
      Asymptotics a{number(tail, "c_lambda", "tail.c_lambda"), number(tail, "l", "tail.l"),
                    number(tail, "c_mu", "tail.c_mu"), number(tail, "m", "tail.m")};
      return RateModel::table(numbers(spec, "lambda", "lambda"), numbers(spec, "mu", "mu"), a);
    }
    throw ValidationError("family", fmt::format("unknown model family '{}'", family));
  }();
  if (spec.contains("P_l") || spec.contains("Q_m")) {
    Asymptotics a = model.asymptotics();
    if (spec.contains("P_l")) a.P_l = number(spec, "P_l", "P_l");
    if (spec.contains("Q_m")) a.Q_m = number(spec, "Q_m", "Q_m");
    model = model.with_asymptotics(a);
  }
  return model;
}

TargetProfile profile_from_json(const json& spec) {
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "linear") return TargetProfile::linear();
    auto suffix = [&s](std::string_view prefix) -> std::optional<double> {
      if (s.rfind(prefix, 0) != 0) return std::nullopt;
      try {
        std::size_t used = 0;
        const std::string rest = s.substr(prefix.size());
        const double v = std::stod(rest, &used);
        if (used != rest.size()) return std::nullopt;
        return v;
      } catch (const std::exception&) {
        return std::nullopt;
      }
    };
    if (auto k = suffix("power:")) return TargetProfile::power(*k);
    if (auto c = suffix("linear:")) return TargetProfile::linear(*c);
    throw ValidationError("profile", fmt::format("unknown profile '{}'", s));
  }
  if (spec.is_object()) {
    const std::string type = spec.value("type", "");
    if (type != "custom-table") throw ValidationError("profile.type", "expected 'custom-table'");
    auto values = numbers(spec, "values", "profile.values");
    if (spec.contains("knots")) return TargetProfile::table(numbers(spec, "knots", "profile.knots"), values);
    return TargetProfile::table(values);
  }
  throw ValidationError("profile", "must be a name or a custom-table object");
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string config_digest(const json& config) { return fnv1a_hex(config.dump()); }

}  // namespace ldpbdp
