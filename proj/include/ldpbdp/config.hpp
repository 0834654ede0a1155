#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"

#include "ldpbdp/process.hpp"
#include "ldpbdp/profile.hpp"

namespace ldpbdp {

inline constexpr std::string_view kToolVersion = "0.3.0";

// {"family":"power","c_lambda":..,"l":..,"c_mu":..,"m":..} or
// {"family":"table","lambda":[..],"mu":[..],"tail":{"c_lambda":..,"l":..,"c_mu":..,"m":..}}.
// Optional "P_l" / "Q_m" override the declared asymptotic constants.
RateModel model_from_json(const nlohmann::json& spec);

// "linear", "power:k", or {"type":"custom-table","values":[..]} with optional
// "knots":[..]; "linear:c" scales the identity.
TargetProfile profile_from_json(const nlohmann::json& spec);

// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

// Digest of a JSON document in canonical (sorted-key, compact) form.
std::string config_digest(const nlohmann::json& config);

}  // namespace ldpbdp
