#include "bklab/generators.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "bklab/error.hpp"

namespace bklab {

namespace {

constexpr double kLn4 = 2.0 * std::numbers::ln2;
constexpr std::int64_t kMaxHorizon = std::int64_t{1} << 40;

std::vector<Atom> zero_law() { return {{0.0, 1.0}}; }

std::vector<Atom> rademacher_law() { return {{-1.0, 0.5}, {1.0, 0.5}}; }

void check_horizon(std::int64_t n_max) {
  require(n_max >= 1, "process horizon must be >= 1");
  if (n_max > kMaxHorizon) fail(ErrorKind::HorizonExceeded, "process horizon exceeds 2^40");
}

// Blocks 1..block_index(n_max) with index ranges clipped to [1, n_max].
std::vector<BlockLaw> empty_blocks(std::int64_t n_max) {
  std::vector<BlockLaw> blocks;
  const int K = block_index(n_max);
  for (int k = 1; k <= K; ++k) {
    BlockLaw b;
    b.k = k;
    b.first = block_start(k);
    b.last = std::min(block_start(k + 1) - 1, n_max);
    b.atoms = zero_law();
    blocks.push_back(std::move(b));
  }
  return blocks;
}

// Smallest k0 in [k_min, K] such that `ok` holds for every k in [k0, K].
int smallest_persistent_block(int k_min, int K, const std::function<bool(int)>& ok, const char* what) {
  if (K < k_min) return k_min;
  if (!ok(K)) {
    fail(ErrorKind::Infeasible, std::string(what) + ": no feasible k0 within horizon (fails at block " +
                                    std::to_string(K) + ")");
  }
  int k0 = K;
  while (k0 > k_min && ok(k0 - 1)) --k0;
  return k0;
}

}  // namespace

std::string_view to_string(ProcessKind kind) noexcept {
  switch (kind) {
    case ProcessKind::IIDDiscrete: return "iid_discrete";
    case ProcessKind::CounterexampleIndependent: return "counterexample_independent";
    case ProcessKind::CounterexampleMDS: return "counterexample_mds";
    case ProcessKind::CounterexampleArbitrary: return "counterexample_arbitrary";
    case ProcessKind::NAViaIndependent: return "na_via_independent";
  }
  return "?";
}

ProcessKind parse_process_kind(std::string_view name) {
  for (auto k : {ProcessKind::IIDDiscrete, ProcessKind::CounterexampleIndependent, ProcessKind::CounterexampleMDS,
                 ProcessKind::CounterexampleArbitrary, ProcessKind::NAViaIndependent}) {
    if (name == to_string(k)) return k;
  }
  fail(ErrorKind::Validation, "unknown process kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

FSpec FSpec::log_tower(int m, double eps) {
  require(m >= 1, "f: log tower order m must be >= 1");
  require(eps >= 0.0 && std::isfinite(eps), "f: log tower eps must be >= 0");
  return FSpec(LogTower{m, eps});
}

FSpec FSpec::dyadic(funclib::DyadicFunction table) { return FSpec(std::move(table)); }

double FSpec::operator()(double x) const {
  if (const auto* t = std::get_if<LogTower>(&repr_)) return funclib::eval_log_tower(t->m, t->eps, x);
  return std::get<funclib::DyadicFunction>(repr_)(x);
}

double FSpec::at_log(double ln_x) const {
  if (const auto* t = std::get_if<LogTower>(&repr_)) return funclib::eval_log_tower_at_log(t->m, t->eps, ln_x);
  return std::get<funclib::DyadicFunction>(repr_)(std::exp(ln_x));
}

std::string FSpec::describe() const {
  std::ostringstream os;
  if (const auto* t = std::get_if<LogTower>(&repr_)) {
    os << "log_tower(m=" << t->m << ",eps=" << t->eps << ")";
  } else {
    os << "dyadic(N=" << table().horizon() << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

bool BlockLaw::is_zero() const noexcept {
  for (const auto& a : atoms) {
    if (a.value != 0.0 && a.prob > 0.0) return false;
  }
  return true;
}

int block_index(std::int64_t n) {
  require(n >= 1, "block_index: n must be >= 1");
  const int bits = std::bit_width(static_cast<std::uint64_t>(n));
  return (bits - 1) / 2 + 1;
}

std::int64_t block_start(int k) {
  require(k >= 1 && k <= 31, "block_start: k out of range");
  return std::int64_t{1} << (2 * (k - 1));
}

const BlockLaw& ProcessSpec::block_for(std::int64_t n) const {
  if (n < 1 || n > n_max) {
    fail(ErrorKind::HorizonExceeded, "index " + std::to_string(n) + " outside [1, " + std::to_string(n_max) + "]");
  }
  return blocks[static_cast<std::size_t>(block_index(n) - 1)];
}

std::vector<Atom> ProcessSpec::marginal(std::int64_t n) const {
  const BlockLaw& b = block_for(n);
  if (b.coupling != Coupling::SignTimesShared) return b.atoms;
  std::map<double, double> acc;
  for (const auto& z : b.atoms) {
    if (z.value == 0.0) {
      acc[0.0] += z.prob;
      continue;
    }
    for (const auto& s : b.sign_atoms) acc[z.value * s.value] += z.prob * s.prob;
  }
  std::vector<Atom> out;
  for (const auto& [v, p] : acc) out.push_back({v, p});
  return out;
}

bool ProcessSpec::independent() const noexcept {
  for (const auto& b : blocks) {
    if (b.coupling == Coupling::Independent) continue;
    if (b.size() == 1) continue;
    if (b.coupling == Coupling::Shared && b.atoms.size() <= 1) continue;
    if (b.coupling == Coupling::SignTimesShared && b.is_zero()) continue;
    return false;
  }
  return true;
}

bool ProcessSpec::is_counterexample() const noexcept {
  return kind == ProcessKind::CounterexampleIndependent || kind == ProcessKind::CounterexampleMDS ||
         kind == ProcessKind::CounterexampleArbitrary;
}

// ---------------------------------------------------------------------------

ProcessSpec build_counterexample_independent(const ExponentParams& params, const FSpec& f, std::int64_t n_max) {
  params.validate();
  check_horizon(n_max);
  const double r = params.r, p = params.p;
  auto pk = [&](int k) { return std::exp(-k * p / r * kLn4) / f.at_log(k / r * kLn4); };

  ProcessSpec spec;
  spec.kind = ProcessKind::CounterexampleIndependent;
  spec.params = params;
  spec.f = f;
  spec.n_max = n_max;
  spec.require_centered = true;
  spec.moment_order = p;
  spec.c_const = std::exp(-3.0 / f.at_log(kLn4 / r));
  const double log_c = std::log(spec.c_const);
  const int K = block_index(n_max);
  auto feasible = [&](int k) {
    const double q = pk(k);
    return q < 0.5 && std::ldexp(1.0, 2 * k) * std::log1p(-2.0 * q) >= log_c;
  };
  spec.k0 = smallest_persistent_block(1, K, feasible, "independent counterexample");
  // Past the horizon p_k only decreases; p_k <= 1/6 gives
  // (1-2p_k)^{4^k} >= exp(-2 4^k p_k/(1-2p_k)) >= c for every later block.
  spec.certified_beyond_horizon = pk(K) <= 1.0 / 6.0;

  spec.blocks = empty_blocks(n_max);
  for (auto& b : spec.blocks) {
    b.atom = std::pow(4.0, b.k / r);
    b.p_k = pk(b.k);
    if (b.k > spec.k0) b.atoms = {{-b.atom, b.p_k}, {0.0, 1.0 - 2.0 * b.p_k}, {b.atom, b.p_k}};
  }
  return spec;
}

ProcessSpec build_counterexample_mds(const ExponentParams& params, const FSpec& f, std::int64_t n_max) {
  params.validate();
  check_horizon(n_max);
  const double r = params.r, p = params.p;
  if (p < 2.0) fail(ErrorKind::Unsupported, "MDS counterexample needs 0 < r < 2 <= p");
  const double expo = 1.0 / r - 0.5;
  auto pk = [&](int k) { return std::exp(k * (1.0 - p / r) * kLn4) / f.at_log(k * expo * kLn4); };

  ProcessSpec spec;
  spec.kind = ProcessKind::CounterexampleMDS;
  spec.params = params;
  spec.f = f;
  spec.n_max = n_max;
  spec.require_centered = true;
  spec.moment_order = 2.0 * (p - r) / (2.0 - r);
  const int K = block_index(n_max);
  spec.k0 = smallest_persistent_block(2, K, [&](int k) { return pk(k) < 1.0; }, "MDS counterexample");
  spec.certified_beyond_horizon = true;  // p_k is decreasing in k

  spec.blocks = empty_blocks(n_max);
  for (auto& b : spec.blocks) {
    b.coupling = Coupling::SignTimesShared;
    b.sign_atoms = rademacher_law();
    b.atom = std::pow(4.0, b.k * expo);
    b.p_k = pk(b.k);
    if (b.k > spec.k0) b.atoms = {{0.0, 1.0 - b.p_k}, {b.atom, b.p_k}};
  }
  return spec;
}

ProcessSpec build_counterexample_arbitrary(const ExponentParams& params, const FSpec& f, std::int64_t n_max) {
  params.validate();
  check_horizon(n_max);
  const double r = params.r, p = params.p;
  if (!(r < 1.0 && p >= 1.0)) fail(ErrorKind::Unsupported, "arbitrary-sequence counterexample needs 0 < r < 1 <= p");
  auto log_atom = [&](int k) { return (1.0 + k * (1.0 / r - 1.0)) * kLn4; };
  auto pk = [&](int k) { return std::exp(k * (1.0 - p / r) * kLn4) / f.at_log(log_atom(k)); };

  ProcessSpec spec;
  spec.kind = ProcessKind::CounterexampleArbitrary;
  spec.params = params;
  spec.f = f;
  spec.n_max = n_max;
  spec.moment_order = (p - r) / (1.0 - r);
  const int K = block_index(n_max);
  spec.k0 = smallest_persistent_block(1, K, [&](int k) { return pk(k) < 1.0; }, "arbitrary counterexample");
  spec.certified_beyond_horizon = true;

  spec.blocks = empty_blocks(n_max);
  for (auto& b : spec.blocks) {
    b.coupling = Coupling::Shared;
    b.atom = std::exp(log_atom(b.k));
    b.p_k = pk(b.k);
    if (b.k > spec.k0) b.atoms = {{0.0, 1.0 - b.p_k}, {b.atom, b.p_k}};
  }
  return spec;
}

ProcessSpec build_baseline(ProcessKind kind, const std::vector<double>& atoms, const std::vector<double>& probs,
                           std::int64_t n_max, bool require_centered) {
  require(kind == ProcessKind::IIDDiscrete || kind == ProcessKind::NAViaIndependent,
          "build_baseline: kind must be iid_discrete or na_via_independent");
  check_horizon(n_max);
  require(!atoms.empty() && atoms.size() == probs.size(), "baseline: atoms and probs must have equal positive length");
  if (kind == ProcessKind::NAViaIndependent) require_centered = true;

  std::map<double, double> law;
  double total = 0.0, mean = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(std::isfinite(atoms[i]), "baseline: atoms must be finite");
    require(probs[i] >= 0.0 && probs[i] <= 1.0, "baseline: probabilities must lie in [0,1]");
    total += probs[i];
    mean += atoms[i] * probs[i];
    scale = std::max(scale, std::abs(atoms[i]));
    if (probs[i] > 0.0) law[atoms[i]] += probs[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "baseline: probabilities must sum to 1");
  if (require_centered) require(std::abs(mean) <= 1e-12 * scale, "baseline: law must be centered");

  ProcessSpec spec;
  spec.kind = kind;
  spec.n_max = n_max;
  spec.require_centered = require_centered;
  spec.blocks = empty_blocks(n_max);
  std::vector<Atom> table;
  for (const auto& [v, p] : law) table.push_back({v, p});
  for (auto& b : spec.blocks) b.atoms = table;
  return spec;
}

ProcessSpec rademacher(std::int64_t n_max) {
  return build_baseline(ProcessKind::NAViaIndependent, {-1.0, 1.0}, {0.5, 0.5}, n_max, true);
}

ProcessSpec zero_process(std::int64_t n_max) {
  return build_baseline(ProcessKind::IIDDiscrete, {0.0}, {1.0}, n_max, true);
}

// ---------------------------------------------------------------------------

PathSampler::PathSampler(const ProcessSpec& spec) : n_max_(spec.n_max) {
  auto cumulate = [](const std::vector<Atom>& atoms, std::vector<double>& values, std::vector<double>& cum) {
    double acc = 0.0;
    for (const auto& a : atoms) {
      if (a.prob <= 0.0) continue;
      acc += a.prob;
      values.push_back(a.value);
      cum.push_back(acc);
    }
    if (values.empty()) {
      values.push_back(0.0);
      cum.push_back(1.0);
    }
  };
  for (const auto& b : spec.blocks) {
    Table t{b.first, b.last, b.coupling, {}, {}, {}, {}};
    cumulate(b.atoms, t.values, t.cum);
    if (b.coupling == Coupling::SignTimesShared) cumulate(b.sign_atoms, t.sign_values, t.sign_cum);
    tables_.push_back(std::move(t));
  }
}

void PathSampler::throw_horizon(std::int64_t n) const {
  fail(ErrorKind::HorizonExceeded,
       "sample length " + std::to_string(n) + " exceeds process horizon " + std::to_string(n_max_));
}

SamplePath sample_path(const ProcessSpec& spec, std::int64_t n, RandomStream& stream) {
  require(n >= 0, "sample_path: n must be >= 0");
  if (n > spec.n_max) {
    fail(ErrorKind::HorizonExceeded, "sample_path: n=" + std::to_string(n) + " exceeds horizon");
  }
  SamplePath path;
  path.x.reserve(static_cast<std::size_t>(n));
  path.s.reserve(static_cast<std::size_t>(n));
  path.m.reserve(static_cast<std::size_t>(n));
  double s = 0.0, m = 0.0;
  PathSampler(spec).run(n, stream, [&](std::int64_t, double x) {
    s += x;
    m = std::max(m, std::abs(s));
    path.x.push_back(x);
    path.s.push_back(s);
    path.m.push_back(m);
  });
  return path;
}

double exact_moment(const ProcessSpec& spec, std::int64_t n, double q_exp, const FSpec& f) {
  require(q_exp > 0.0, "exact_moment: exponent must be positive");
  double total = 0.0;
  for (const auto& a : spec.marginal(n)) {
    if (a.value == 0.0 || a.prob == 0.0) continue;
    const double ln_abs = std::log(std::abs(a.value));
    total += std::exp(q_exp * ln_abs) * f.at_log(ln_abs) * a.prob;
  }
  return total;
}

double exact_moment(const ProcessSpec& spec, std::int64_t n, double q_exp) {
  require(spec.f.has_value(), "exact_moment: process carries no f");
  return exact_moment(spec, n, q_exp, *spec.f);
}

}  // namespace bklab
