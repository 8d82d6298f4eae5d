#include "bklab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "bklab/bounds.hpp"
#include "bklab/error.hpp"
#include "bklab/exact.hpp"
#include "bklab/funclib.hpp"
#include "bklab/montecarlo.hpp"
#include "bklab/series.hpp"

namespace bklab::cli {

using config::json;
namespace fl = funclib;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

// ----------------------------------------------------------------- output ---

struct Meta {
  std::string command;
  std::string hash;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;

  std::string comment() const {
    std::ostringstream os;
    os << "# bklab " << kVersion << " command=" << command << " config_hash=" << hash
       << " seed=" << (seed ? std::to_string(*seed) : "none")
       << " horizon=" << (horizon ? std::to_string(*horizon) : "none") << " modules=" << kModuleVersions << "\n";
    return os.str();
  }

  json as_json() const {
    json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["config_hash"] = hash;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["horizon"] = horizon ? json(*horizon) : json(nullptr);
    j["modules"] = kModuleVersions;
    return j;
  }
};

class Csv {
 public:
  Csv(const Meta& meta, const std::string& header) { text_ = meta.comment() + header + "\n"; }

  Csv& operator<<(double v) { return cell(format_number(v)); }
  Csv& operator<<(std::int64_t v) { return cell(std::to_string(v)); }
  Csv& operator<<(std::uint64_t v) { return cell(std::to_string(v)); }
  Csv& operator<<(int v) { return cell(std::to_string(v)); }
  Csv& operator<<(bool v) { return cell(v ? "1" : "0"); }
  Csv& operator<<(std::string_view v) { return cell(std::string(v)); }
  Csv& operator<<(const char* v) { return cell(v); }
  void end_row() {
    text_ += "\n";
    fresh_ = true;
  }
  const std::string& text() const { return text_; }

 private:
  Csv& cell(const std::string& s) {
    if (!fresh_) text_ += ",";
    text_ += s;
    fresh_ = false;
    return *this;
  }
  std::string text_;
  bool fresh_ = true;
};

class Output {
 public:
  Output(std::string dir, Meta meta) : dir_(std::move(dir)), meta_(std::move(meta)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::Validation, "cannot create output directory '" + dir_ + "': " + ec.message());
  }

  const Meta& meta() const { return meta_; }
  Csv csv(const std::string& header) const { return Csv(meta_, header); }

  void write(const std::string& name, const std::string& text) {
    const auto path = (std::filesystem::path(dir_) / name).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Validation, "cannot write '" + path + "'");
    f << text;
    files_.push_back(path);
  }
  void write(const std::string& name, const Csv& csv) { write(name, csv.text()); }
  void write_json(const std::string& name, json body) {
    body["meta"] = meta_.as_json();
    write(name, body.dump(2) + "\n");
  }

  std::vector<std::string> files() const { return files_; }

 private:
  std::string dir_;
  Meta meta_;
  std::vector<std::string> files_;
};

constexpr const char* kTailHeader = "n,t,statistic,trials,hits,p_hat,ci_low,ci_high,provenance";
constexpr const char* kLedgerHeader =
    "n,t,statistic,trials,hits,p_hat,ci_low,ci_high,provenance,weight,increment,cum_sum,cum_low,cum_high";

void tail_cells(Csv& csv, const TailEstimate& e) {
  csv << e.n << e.t << to_string(e.statistic) << e.trials << e.hits << e.p_hat << e.ci_low << e.ci_high
      << to_string(e.provenance);
}

// ----------------------------------------------------------------- config ---

std::uint64_t seed_of(const json& cfg) {
  if (!cfg.contains("seed")) fail(ErrorKind::Validation, "config: 'seed' is mandatory for stochastic commands");
  return config::get_u64(cfg, "seed");
}

std::uint64_t trials_of(const json& cfg) {
  const std::int64_t t = config::get_int(cfg, "trials");
  require(t >= 1 && t <= 0xffffffffll, "config: 'trials' must lie in [1, 2^32)");
  return static_cast<std::uint64_t>(t);
}

McOptions mc_options(const Invocation& inv, Comparison cmp = Comparison::Greater) {
  McOptions opt;
  opt.trials = trials_of(inv.config);
  opt.seed = seed_of(inv.config);
  opt.threads = inv.threads;
  opt.cmp = cmp;
  return opt;
}

ProcessSpec process_of(const json& cfg) { return config::process_from_json(cfg.at("process"), cfg); }

Comparison comparison_of(const json& cfg) {
  const std::string c = config::get_string(cfg, "comparison", "gt");
  if (c == "gt") return Comparison::Greater;
  if (c == "ge") return Comparison::GreaterEqual;
  fail(ErrorKind::Validation, "config: 'comparison' must be 'gt' or 'ge'");
}

std::vector<std::int64_t> n_grid_of(const json& cfg) {
  auto grid = config::get_ints(cfg, "n_grid");
  require(!grid.empty(), "config: 'n_grid' must not be empty");
  require(std::is_sorted(grid.begin(), grid.end()), "config: 'n_grid' must be sorted ascending");
  for (auto n : grid) require(n >= 1, "config: 'n_grid' entries must be >= 1");
  return grid;
}

// Exact tails for each n at t = eps n^{1/r} (or the fixed "t").
std::vector<TailEstimate> exact_tails(const json& cfg, const ProcessSpec& spec, Statistic stat) {
  const auto grid = n_grid_of(cfg);
  const Comparison cmp = comparison_of(cfg);
  const std::int64_t limit = config::get_int(cfg, "enumeration_limit", kDefaultEnumerationLimit);
  std::optional<ExponentParams> params;
  if (!cfg.contains("t")) params = config::params_from_json(cfg);
  std::vector<TailEstimate> out;
  for (auto n : grid) {
    const double t = params ? threshold(*params, static_cast<double>(n)) : config::get_double(cfg, "t");
    const double p = stat == Statistic::S ? exact_tail_S(spec, n, t, cmp) : exact_tail_M(spec, n, t, cmp, limit);
    out.push_back(make_exact_estimate(n, t, stat, p));
  }
  return out;
}

// --------------------------------------------------------------- commands ---

void cmd_exponent(const Invocation& inv, Output& o, std::ostream& out) {
  std::vector<json> rows;
  if (inv.config.contains("rows")) {
    for (const auto& r : inv.config.at("rows")) rows.push_back(r);
  } else {
    rows.push_back(inv.config);
  }
  Csv csv = o.csv("regime,r,p,q");
  for (const auto& row : rows) {
    const DependenceRegime regime = parse_regime(config::get_string(row, "regime"));
    const double r = config::get_double(row, "r"), p = config::get_double(row, "p");
    const double q = critical_exponent(regime, r, p);
    csv << to_string(regime) << r << p << q;
    csv.end_row();
    out << to_string(regime) << "," << format_number(r) << "," << format_number(p) << "," << format_number(q)
        << "\n";
  }
  o.write("exponent.csv", csv);
}

fl::SummableSeq sequence_of(const json& j, int horizon) {
  const std::string type = config::get_string(j, "type");
  if (type == "inverse_n_log_squared") return fl::SummableSeq::inverse_n_log_squared(horizon);
  if (type == "geometric") return fl::SummableSeq::geometric(config::get_double(j, "ratio"), horizon);
  if (type == "log_tower_reciprocal") {
    return fl::SummableSeq::log_tower_reciprocal(static_cast<int>(config::get_int(j, "m")),
                                                  config::get_double(j, "eps"), horizon);
  }
  fail(ErrorKind::Validation, "config: unknown sequence type '" + type + "'");
}

void cmd_envelope(const Invocation& inv, Output& o, std::ostream& out) {
  const json& cfg = inv.config;
  const std::string construction = config::get_string(cfg, "construction");
  const std::int64_t horizon64 = config::get_int(cfg, "horizon");
  require(horizon64 >= 1 && horizon64 <= 10'000'000, "config: 'horizon' out of range");
  const int horizon = static_cast<int>(horizon64);
  json report;
  report["construction"] = construction;

  if (construction == "regularize") {
    const auto seq = sequence_of(cfg.at("sequence"), horizon);
    const auto reg = fl::regularize_sequence(seq);
    const auto rep = fl::check_regularization(seq, reg);
    Csv csv = o.csv("n,a,b,block");
    for (int n = 1; n <= horizon; ++n) {
      csv << n << seq.term(n) << reg.b[static_cast<std::size_t>(n - 1)] << reg.schedule.block_of(n);
      csv.end_row();
    }
    o.write("envelope.csv", csv);
    report["n_breaks"] = reg.schedule.n_breaks;
    report["certified"] = reg.schedule.certified;
    report["tail_sum"] = rep.tail_sum;
    report["domination_violations"] = rep.domination_violations;
    report["monotonicity_violations"] = rep.monotonicity_violations;
    report["ratio_violations"] = rep.ratio_violations;
    report["ok"] = rep.ok();
  } else {
    require(horizon <= 1000, "config: 'horizon' for dyadic constructions must be <= 1000");
    const fl::DyadicFunction g = config::dyadic_from_json(cfg.at("g"), horizon);
    if (construction == "convex_linear") {
      const auto env = fl::convex_linear_envelope(g);
      const auto rep = fl::check_convex_envelope(env);
      Csv csv = o.csv("n,a,b,slope");
      for (int n = 1; n <= env.horizon(); ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        csv << n << env.a()[i] << env.b()[i] << env.slopes()[static_cast<std::size_t>(n)];
        csv.end_row();
      }
      o.write("envelope.csv", csv);
      report["max_ratio"] = rep.max_ratio;
      report["ratio_violations"] = rep.ratio_violations;
      report["slope_violations"] = rep.slope_violations;
      report["monotonicity_violations"] = rep.monotonicity_violations;
      report["continuity_violations"] = rep.continuity_violations;
      report["ok"] = rep.ok();
    } else if (construction == "smooth") {
      const auto env = fl::smooth_c2_envelope(g);
      const auto rep = fl::check_smoothness(env, static_cast<std::size_t>(config::get_int(cfg, "samples", 1000)),
                                            static_cast<std::uint64_t>(config::get_int(cfg, "check_seed", 0)));
      Csv csv = o.csv("n,value,q");
      for (int n = 1; n <= env.horizon(); ++n) {
        csv << n << env.value(std::ldexp(1.0, n)) << (n < env.horizon() ? env.q(n) : std::nan(""));
        csv.end_row();
      }
      o.write("envelope.csv", csv);
      report["samples"] = rep.samples;
      report["derivative_violations"] = rep.derivative_violations;
      report["growth_violations"] = rep.growth_violations;
      report["max_err1"] = rep.max_err1;
      report["max_err2"] = rep.max_err2;
      report["ok"] = rep.ok();
    } else if (construction == "power_concave" || construction == "power_convex") {
      const bool concave = construction == "power_concave";
      const auto smooth = fl::smooth_c2_envelope(g);
      const double e = config::get_double(cfg, "exponent");
      const auto env = concave ? fl::power_concave(smooth, e) : fl::power_convex(smooth, e);
      const auto rep = fl::check_power_envelope(env, concave);
      Csv csv = o.csv("x,value");
      for (int n = 0; n <= smooth.horizon(); ++n) {
        const double x = std::ldexp(1.0, n);
        csv << x << env(x);
        csv.end_row();
      }
      o.write("envelope.csv", csv);
      report["threshold"] = env.threshold;
      report["affine_slope"] = env.affine_slope;
      report["at_zero"] = env.at_zero();
      report["shape_violations"] = rep.violations;
      report["continuity_rel_err"] = rep.continuity_rel_err;
      report["ok"] = rep.ok();
    } else if (construction == "sqrt_compose") {
      const auto comp = fl::sqrt_compose(g, config::get_double(cfg, "q"));
      Csv csv = o.csv("n,f");
      for (int n = 1; n <= comp.f.horizon(); ++n) {
        csv << n << comp.f.at_dyadic(n);
        csv.end_row();
      }
      o.write("envelope.csv", csv);
      report["threshold"] = comp.threshold;
      report["ok"] = true;
    } else {
      fail(ErrorKind::Validation, "config: unknown construction '" + construction + "'");
    }
  }
  o.write_json("envelope.json", report);
  out << "construction=" << construction << " ok=" << (report["ok"].get<bool>() ? "true" : "false") << "\n";
}

void cmd_spec(const Invocation& inv, Output& o, std::ostream& out) {
  const ProcessSpec spec = process_of(inv.config);
  Csv csv = o.csv("k,first,last,active,atom,p_k,moment");
  double moment = 0.0;
  for (const auto& b : spec.blocks) {
    const bool active = !b.is_zero();
    double m = std::nan("");
    if (spec.f && spec.moment_order > 0.0) {
      m = exact_moment(spec, b.first, spec.moment_order);
      if (active) moment = std::max(moment, m);
    }
    csv << b.k << b.first << b.last << active << b.atom << b.p_k << m;
    csv.end_row();
  }
  o.write("spec.csv", csv);
  json body = config::to_json(spec);
  body["moment"] = spec.f ? json(moment) : json(nullptr);
  o.write_json("spec.json", body);
  out << "kind=" << to_string(spec.kind) << " k0=" << spec.k0 << " c_const=" << format_number(spec.c_const)
      << " p_1=" << format_number(spec.blocks.front().p_k) << " moment=" << format_number(moment) << "\n";
}

void cmd_oracle(const Invocation& inv, Output& o, std::ostream& out) {
  const ProcessSpec spec = process_of(inv.config);
  const Statistic stat = parse_statistic(config::get_string(inv.config, "statistic", "S"));
  Csv csv = o.csv(kTailHeader);
  const auto tails = exact_tails(inv.config, spec, stat);
  for (const auto& e : tails) {
    tail_cells(csv, e);
    csv.end_row();
  }
  o.write("oracle.csv", csv);
  out << "rows=" << tails.size() << "\n";
}

void cmd_simulate(const Invocation& inv, Output& o, std::ostream& out) {
  const json& cfg = inv.config;
  const ProcessSpec spec = process_of(cfg);
  const Statistic stat = parse_statistic(config::get_string(cfg, "statistic", "M"));
  const McOptions opt = mc_options(inv, comparison_of(cfg));
  std::vector<TailEstimate> rows;
  if (cfg.contains("t_grid")) {
    const auto t_grid = config::get_doubles(cfg, "t_grid");
    for (auto n : n_grid_of(cfg)) {
      for (auto& e : estimate_tail_multi(spec, n, t_grid, stat, opt)) rows.push_back(e);
    }
  } else {
    rows = estimate_grid(spec, config::params_from_json(cfg), n_grid_of(cfg), stat, opt);
  }
  Csv csv = o.csv(kTailHeader);
  for (const auto& e : rows) {
    tail_cells(csv, e);
    csv.end_row();
  }
  o.write("simulate.csv", csv);
  out << "rows=" << rows.size() << "\n";
}

void cmd_bounds_check(const Invocation& inv, Output& o, std::ostream& out) {
  const json& cfg = inv.config;
  const ProcessSpec spec = process_of(cfg);
  const std::int64_t n = config::get_int(cfg, "n");
  const auto x_grid = config::get_doubles(cfg, "x_grid");
  const double alpha = config::get_double(cfg, "alpha", 0.5);
  const double a_factor = config::get_double(cfg, "a_factor", 0.125);
  const double doob_p = config::get_double(cfg, "doob_p", 2.0);
  const McOptions opt = mc_options(inv, Comparison::GreaterEqual);
  const auto est = estimate_tail_multi(spec, n, x_grid, Statistic::M, opt);
  const double moment = exact_abs_moment_S(spec, n, doob_p);
  const double B = exact_second_moment_sum(spec, n);

  Csv csv = o.csv("n,x,trials,hits,p_hat,ci_low,ci_high,doob,shao,doob_margin,shao_margin,doob_violation,shao_violation");
  std::size_t doob_flags = 0, shao_flags = 0;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    ShaoInputs in{x, a_factor * x, alpha, B, exact_p_max(spec, n, a_factor * x)};
    const auto d = empirical_violation(doob_bound(moment, x, doob_p), est[i]);
    const auto s = empirical_violation(shao_bound(in), est[i]);
    doob_flags += d.violated;
    shao_flags += s.violated;
    csv << n << x << est[i].trials << est[i].hits << est[i].p_hat << est[i].ci_low << est[i].ci_high << d.bound
        << s.bound << d.margin << s.margin << d.violated << s.violated;
    csv.end_row();
  }
  o.write("bounds.csv", csv);
  o.write_json("bounds.json", {{"doob_violations", doob_flags}, {"shao_violations", shao_flags}, {"B_n", B},
                               {"doob_moment", moment}});
  out << "doob_violations=" << doob_flags << " shao_violations=" << shao_flags << "\n";
}

void cmd_series(const Invocation& inv, Output& o, std::ostream& out) {
  const json& cfg = inv.config;
  const ProcessSpec spec = process_of(cfg);
  const ExponentParams params = config::params_from_json(cfg);
  const std::string source = config::get_string(cfg, "source", "exact");
  std::vector<TailEstimate> tails;
  if (source == "exact") {
    tails = exact_tails(cfg, spec, parse_statistic(config::get_string(cfg, "statistic", "S")));
  } else if (source == "montecarlo") {
    tails = estimate_grid(spec, params, n_grid_of(cfg), parse_statistic(config::get_string(cfg, "statistic", "M")),
                          mc_options(inv, comparison_of(cfg)));
  } else {
    fail(ErrorKind::Validation, "config: 'source' must be 'exact' or 'montecarlo'");
  }
  const SeriesLedger ledger = assemble(params, tails);
  Csv csv = o.csv(kLedgerHeader);
  std::vector<double> index, inc;
  for (const auto& row : ledger.rows) {
    tail_cells(csv, row.tail);
    csv << row.weight << row.increment << row.cum_sum << row.cum_low << row.cum_high;
    csv.end_row();
    index.push_back(static_cast<double>(row.tail.n));
    inc.push_back(row.increment);
  }
  o.write("series.csv", csv);

  json body;
  body["total"] = ledger.total();
  const double target = config::get_double(cfg, "target", 1.0);
  const auto window = static_cast<std::size_t>(config::get_int(cfg, "window", 8));
  const double delta = config::get_double(cfg, "delta", 0.1);
  if (index.size() >= 2) {
    const auto d = diagnose_divergence(index, inc, target, std::max<std::size_t>(window, 2), delta);
    body["ledger_diagnostic"] = {{"partial_sum", d.partial_sum}, {"slope", d.slope}, {"detected", d.detected}};
  }
  if (spec.is_counterexample() && cfg.contains("certificate_K")) {
    const auto cert = divergence_certificate(spec, static_cast<int>(config::get_int(cfg, "certificate_K")));
    Csv cc = o.csv("k,c,term,partial");
    std::vector<double> ks, terms;
    for (const auto& t : cert.terms) {
      cc << t.k << t.c << t.term << t.partial;
      cc.end_row();
      ks.push_back(t.k);
      terms.push_back(t.term);
    }
    o.write("certificate.csv", cc);
    body["certificate"] = {{"k0", cert.k0}, {"block_scale", cert.block_scale}, {"partial_sum", cert.partial_sum()}};
    if (ks.size() >= 2) {
      const auto d = diagnose_divergence(ks, terms, target, std::max<std::size_t>(window, 2), delta);
      body["certificate"]["detected"] = d.detected;
      body["certificate"]["slope"] = d.slope;
    }
  }
  o.write_json("series.json", body);
  out << "rows=" << ledger.rows.size() << " total=" << format_number(ledger.total()) << "\n";
}

void cmd_statement1(const Invocation& inv, Output& o, std::ostream& out) {
  const json& cfg = inv.config;
  const ProcessSpec spec = process_of(cfg);
  const ExponentParams params = config::params_from_json(cfg);
  const McOptions opt = mc_options(inv);
  const std::string mode = config::get_string(cfg, "mode", params.p == params.r ? "dyadic" : "rate");
  if (mode == "dyadic") {
    const auto ledger = statement1_dyadic(spec, params, static_cast<int>(config::get_int(cfg, "N_dyadic")), opt);
    Csv csv = o.csv(kLedgerHeader);
    for (const auto& row : ledger.rows) {
      tail_cells(csv, row.tail);
      csv << row.weight << row.increment << row.cum_sum << row.cum_low << row.cum_high;
      csv.end_row();
    }
    o.write("statement1.csv", csv);
    out << "mode=dyadic total=" << format_number(ledger.total()) << "\n";
  } else if (mode == "rate") {
    const auto rows = statement1_rate(spec, params, config::get_ints(cfg, "anchors"),
                                      config::get_int(cfg, "K_window"), opt);
    Csv csv = o.csv("anchor,window_end,eps,trials,hits,p_hat,ci_low,ci_high,comparison,scaled,bound_kind");
    for (const auto& r : rows) {
      csv << r.anchor << r.window_end << r.estimate.t << r.estimate.trials << r.estimate.hits << r.estimate.p_hat
          << r.estimate.ci_low << r.estimate.ci_high << r.comparison << r.scaled << "lower";
      csv.end_row();
    }
    o.write("statement1.csv", csv);
    out << "mode=rate rows=" << rows.size() << "\n";
  } else {
    fail(ErrorKind::Validation, "config: 'mode' must be 'dyadic' or 'rate'");
  }
}

using Handler = void (*)(const Invocation&, Output&, std::ostream&);

struct Command {
  const char* name;
  const char* help;
  Handler handler;
};

const std::vector<Command>& table() {
  static const std::vector<Command> t = {
      {"exponent", "critical moment exponents q(r, p) per regime", cmd_exponent},
      {"envelope", "run an envelope construction and audit it", cmd_envelope},
      {"spec", "build a process and print its block table", cmd_spec},
      {"oracle", "exact tail probabilities", cmd_oracle},
      {"simulate", "Monte Carlo tail estimates", cmd_simulate},
      {"bounds-check", "Doob and Shao bounds against simulation", cmd_bounds_check},
      {"series", "series ledger and divergence certificate", cmd_series},
      {"statement1", "dyadic and rate diagnostics", cmd_statement1},
  };
  return t;
}

std::optional<std::int64_t> horizon_of(const json& cfg) {
  if (cfg.contains("process") && cfg.at("process").is_object() && cfg.at("process").contains("horizon")) {
    return config::get_int(cfg.at("process"), "horizon");
  }
  if (cfg.contains("horizon")) return config::get_int(cfg, "horizon");
  return std::nullopt;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : table()) v.emplace_back(c.name);
    return v;
  }();
  return names;
}

std::vector<std::string> execute(const Invocation& inv, std::ostream& out) {
  require(inv.config.is_object(), "config: top level must be a JSON object");
  require(inv.threads >= 1 && inv.threads <= 1024, "--threads must lie in [1, 1024]");
  for (const auto& c : table()) {
    if (inv.command != c.name) continue;
    Meta meta;
    meta.command = c.name;
    meta.hash = config::hex64(config::config_hash(inv.config));
    if (inv.config.contains("seed")) meta.seed = config::get_u64(inv.config, "seed");
    meta.horizon = horizon_of(inv.config);
    Output o(inv.out_dir, meta);
    try {
      c.handler(inv, o, out);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Validation, std::string("config: ") + e.what());
    }
    return o.files();
  }
  fail(ErrorKind::Validation, "unknown command '" + inv.command + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Baum-Katz experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 0, trials = 0;
  unsigned threads = 1;
  std::vector<CLI::Option*> seed_opts, trial_opts;
  for (const auto& c : table()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--out", out_dir, "output directory");
    seed_opts.push_back(sub->add_option("--seed", seed, "seed override"));
    sub->add_option("--threads", threads, "worker threads (results do not depend on it)");
    trial_opts.push_back(sub->add_option("--trials", trials, "trial count override"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error:" << to_string(ErrorKind::Validation) << ":" << one_line(e.what()) << "\n";
    return exit_code(ErrorKind::Validation);
  }

  try {
    Invocation inv;
    inv.command = app.get_subcommands().front()->get_name();
    inv.out_dir = out_dir;
    inv.threads = threads;
    std::ifstream f(config_path, std::ios::binary);
    if (!f) fail(ErrorKind::Validation, "cannot read config '" + config_path + "'");
    try {
      inv.config = json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Validation, std::string("config is not valid JSON: ") + e.what());
    }
    if (!inv.config.is_object()) fail(ErrorKind::Validation, "config: top level must be a JSON object");
    for (auto* o : seed_opts) {
      if (o->count() > 0) inv.config["seed"] = seed;
    }
    for (auto* o : trial_opts) {
      if (o->count() > 0) inv.config["trials"] = trials;
    }
    execute(inv, out);
    return 0;
  } catch (const LabError& e) {
    err << "error:" << to_string(e.kind()) << ":" << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error:internal:" << one_line(e.what()) << "\n";
    return 1;
  }
}

}  // namespace bklab::cli
