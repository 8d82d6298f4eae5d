#pragma once

// JSON forms of exponent parameters, f specifications and process specs, as
// read from experiment configs and written into result files.

#include <cstdint>
#include <string>

#include "json.hpp"

#include "bklab/classes.hpp"
#include "bklab/funclib.hpp"
#include "bklab/generators.hpp"

namespace bklab::config {

using json = nlohmann::json;

/// {"r", "p", "eps"}; eps defaults to 1.
ExponentParams params_from_json(const json& j);
json to_json(const ExponentParams& params);

/// {"type": "log_tower", "m", "eps"} or {"type": "dyadic", "values", "below_2"}.
FSpec fspec_from_json(const json& j);
json to_json(const FSpec& f);

/// Dyadic table on 2^1..2^horizon from an f specification.
funclib::DyadicFunction dyadic_from_json(const json& j, int horizon);

/// {"kind", "horizon", "atoms", "probs", "centered", "params", "f"}; params
/// and f fall back to `defaults` (the config root) when absent.
ProcessSpec process_from_json(const json& j, const json& defaults = json::object());

/// Construction inputs plus the derived block table. process_from_json of the
/// result rebuilds an identical spec.
json to_json(const ProcessSpec& spec);

/// FNV-1a 64 of the canonical (key-sorted, compact) dump.
std::uint64_t config_hash(const json& j);
std::string hex64(std::uint64_t v);

/// Typed lookups that raise Validation errors naming the key.
double get_double(const json& j, const std::string& key);
double get_double(const json& j, const std::string& key, double fallback);
std::int64_t get_int(const json& j, const std::string& key);
std::int64_t get_int(const json& j, const std::string& key, std::int64_t fallback);
std::uint64_t get_u64(const json& j, const std::string& key);
std::string get_string(const json& j, const std::string& key);
std::string get_string(const json& j, const std::string& key, const std::string& fallback);
std::vector<double> get_doubles(const json& j, const std::string& key);
std::vector<std::int64_t> get_ints(const json& j, const std::string& key);

}  // namespace bklab::config
