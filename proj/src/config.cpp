#include "bklab/config.hpp"

#include <cmath>
#include <cstdio>

#include "bklab/error.hpp"

namespace bklab::config {

namespace {

const json& field(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Validation, "config: missing key '" + key + "'");
  return j.at(key);
}

std::int64_t as_int(const json& v, const std::string& key) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
  }
  fail(ErrorKind::Validation, "config: '" + key + "' must be an integer");
}

double as_double(const json& v, const std::string& key) {
  if (!v.is_number()) fail(ErrorKind::Validation, "config: '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

double get_double(const json& j, const std::string& key) { return as_double(field(j, key), key); }

double get_double(const json& j, const std::string& key, double fallback) {
  return j.is_object() && j.contains(key) ? get_double(j, key) : fallback;
}

std::int64_t get_int(const json& j, const std::string& key) { return as_int(field(j, key), key); }

std::int64_t get_int(const json& j, const std::string& key, std::int64_t fallback) {
  return j.is_object() && j.contains(key) ? get_int(j, key) : fallback;
}

std::uint64_t get_u64(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const std::int64_t i = as_int(v, key);
  if (i < 0) fail(ErrorKind::Validation, "config: '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(i);
}

std::string get_string(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_string()) fail(ErrorKind::Validation, "config: '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
  return j.is_object() && j.contains(key) ? get_string(j, key) : fallback;
}

std::vector<double> get_doubles(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_array()) fail(ErrorKind::Validation, "config: '" + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_double(e, key));
  return out;
}

std::vector<std::int64_t> get_ints(const json& j, const std::string& key) {
  const json& v = field(j, key);
  if (!v.is_array()) fail(ErrorKind::Validation, "config: '" + key + "' must be an array");
  std::vector<std::int64_t> out;
  for (const auto& e : v) out.push_back(as_int(e, key));
  return out;
}

ExponentParams params_from_json(const json& j) {
  ExponentParams p;
  p.r = get_double(j, "r");
  p.p = get_double(j, "p");
  p.eps = get_double(j, "eps", 1.0);
  p.validate();
  return p;
}

json to_json(const ExponentParams& params) { return {{"r", params.r}, {"p", params.p}, {"eps", params.eps}}; }

FSpec fspec_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Validation, "config: 'f' must be an object");
  const std::string type = get_string(j, "type");
  if (type == "log_tower") {
    return FSpec::log_tower(static_cast<int>(get_int(j, "m")), get_double(j, "eps", 0.0));
  }
  if (type == "dyadic") {
    const auto values = get_doubles(j, "values");
    if (j.contains("below_2")) return FSpec::dyadic(funclib::DyadicFunction::from_values(values, get_double(j, "below_2")));
    return FSpec::dyadic(funclib::DyadicFunction::from_values(values));
  }
  fail(ErrorKind::Validation, "config: unknown f type '" + type + "'");
}

json to_json(const FSpec& f) {
  if (f.is_log_tower()) return {{"type", "log_tower"}, {"m", f.tower().m}, {"eps", f.tower().eps}};
  const auto& t = f.table();
  return {{"type", "dyadic"}, {"values", t.dyadic_values()}, {"below_2", t.below_two()}};
}

funclib::DyadicFunction dyadic_from_json(const json& j, int horizon) {
  const FSpec f = fspec_from_json(j);
  if (f.is_log_tower()) return funclib::DyadicFunction::log_tower(f.tower().m, f.tower().eps, horizon);
  return f.table();
}

ProcessSpec process_from_json(const json& j, const json& defaults) {
  if (!j.is_object()) fail(ErrorKind::Validation, "config: 'process' must be an object");
  const ProcessKind kind = parse_process_kind(get_string(j, "kind"));
  const std::int64_t n_max = get_int(j, "horizon");
  switch (kind) {
    case ProcessKind::IIDDiscrete:
    case ProcessKind::NAViaIndependent: {
      const bool centered = j.contains("centered") ? j.at("centered").get<bool>() : false;
      return build_baseline(kind, get_doubles(j, "atoms"), get_doubles(j, "probs"), n_max, centered);
    }
    default:
      break;
  }
  const json& pj = j.contains("params") ? j.at("params") : defaults;
  const ExponentParams params = params_from_json(pj);
  const json* fj = j.contains("f") ? &j.at("f") : (defaults.is_object() && defaults.contains("f") ? &defaults.at("f") : nullptr);
  if (fj == nullptr) fail(ErrorKind::Validation, "config: counterexample process needs 'f'");
  const FSpec f = fspec_from_json(*fj);
  switch (kind) {
    case ProcessKind::CounterexampleIndependent: return build_counterexample_independent(params, f, n_max);
    case ProcessKind::CounterexampleMDS: return build_counterexample_mds(params, f, n_max);
    default: return build_counterexample_arbitrary(params, f, n_max);
  }
}

json to_json(const ProcessSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  j["horizon"] = spec.n_max;
  if (spec.is_counterexample()) {
    j["params"] = to_json(spec.params);
    if (spec.f) j["f"] = to_json(*spec.f);
  } else {
    std::vector<double> atoms, probs;
    for (const auto& a : spec.blocks.front().atoms) {
      atoms.push_back(a.value);
      probs.push_back(a.prob);
    }
    j["atoms"] = atoms;
    j["probs"] = probs;
    j["centered"] = spec.require_centered;
  }
  json derived;
  derived["k0"] = spec.k0;
  derived["c_const"] = spec.c_const;
  derived["moment_order"] = spec.moment_order;
  derived["certified_beyond_horizon"] = spec.certified_beyond_horizon;
  json blocks = json::array();
  for (const auto& b : spec.blocks) {
    blocks.push_back({{"k", b.k}, {"first", b.first}, {"last", b.last}, {"atom", b.atom}, {"p_k", b.p_k},
                      {"active", !b.is_zero()}});
  }
  derived["blocks"] = blocks;
  j["derived"] = derived;
  return j;
}

std::uint64_t config_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace bklab::config
