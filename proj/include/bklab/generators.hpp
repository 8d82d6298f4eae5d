#pragma once

// Block-structured discrete processes: the three counterexample
// constructions and i.i.d. baselines. Indices are grouped into blocks
// [4^{k-1}, 4^k); within a block every X_n has the same marginal law.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bklab/classes.hpp"
#include "bklab/funclib.hpp"
#include "bklab/random.hpp"

namespace bklab {

enum class ProcessKind {
  IIDDiscrete,
  CounterexampleIndependent,
  CounterexampleMDS,
  CounterexampleArbitrary,
  NAViaIndependent,
};

std::string_view to_string(ProcessKind kind) noexcept;
ProcessKind parse_process_kind(std::string_view name);

/// The moment correction f: a log tower f_{m,eps} or a dyadic table.
class FSpec {
 public:
  struct LogTower {
    int m = 1;
    double eps = 0.0;
  };

  static FSpec log_tower(int m, double eps);
  static FSpec dyadic(funclib::DyadicFunction table);

  double operator()(double x) const;
  /// f(e^{ln_x}); log towers never overflow, tables throw past their horizon.
  double at_log(double ln_x) const;

  bool is_log_tower() const noexcept { return std::holds_alternative<LogTower>(repr_); }
  const LogTower& tower() const { return std::get<LogTower>(repr_); }
  const funclib::DyadicFunction& table() const { return std::get<funclib::DyadicFunction>(repr_); }
  std::string describe() const;

 private:
  explicit FSpec(std::variant<LogTower, funclib::DyadicFunction> repr) : repr_(std::move(repr)) {}
  std::variant<LogTower, funclib::DyadicFunction> repr_;
};

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

enum class Coupling {
  Independent,      // every index draws from `atoms` independently
  Shared,           // one draw per block, copied to every index of the block
  SignTimesShared,  // one draw Z per block times an independent sign per index
};

struct BlockLaw {
  int k = 0;
  std::int64_t first = 0;  // inclusive index range, clipped to the horizon
  std::int64_t last = 0;
  Coupling coupling = Coupling::Independent;
  std::vector<Atom> atoms;
  std::vector<Atom> sign_atoms;  // SignTimesShared only
  double p_k = 0.0;              // counterexamples: probability parameter of the block
  double atom = 0.0;             // counterexamples: nonzero magnitude of the block

  std::int64_t size() const noexcept { return last - first + 1; }
  bool is_zero() const noexcept;
};

/// Block index k with 4^{k-1} <= n < 4^k.
int block_index(std::int64_t n);
/// First index 4^{k-1} of block k.
std::int64_t block_start(int k);

struct ProcessSpec {
  ProcessKind kind = ProcessKind::IIDDiscrete;
  ExponentParams params;
  std::optional<FSpec> f;
  std::vector<BlockLaw> blocks;  // contiguous cover of [1, n_max]
  int k0 = 0;
  double c_const = 0.0;       // exp(-3/f(4^{1/r})) for the independent counterexample, else 0
  double moment_order = 0.0;  // q for which sup E|X_n|^q f(|X_n|) is a known constant
  bool certified_beyond_horizon = false;
  std::int64_t n_max = 0;
  bool require_centered = false;

  const BlockLaw& block_for(std::int64_t n) const;
  /// Marginal law of X_n.
  std::vector<Atom> marginal(std::int64_t n) const;
  /// True when X_1, X_2, ... are independent.
  bool independent() const noexcept;
  bool is_counterexample() const noexcept;
};

/// +-4^{k/r} with probability p_k = 4^{-kp/r}/f(4^{k/r}) each on block k > k0.
ProcessSpec build_counterexample_independent(const ExponentParams& params, const FSpec& f,
                                             std::int64_t n_max);

/// X_n = Y_n Z_k, Y_n Rademacher, Z_k = 4^{k(1/r-1/2)} with probability
/// p_k = 4^{k(1-p/r)}/f(4^{k(1/r-1/2)}). Requires 0 < r < 2 <= p.
ProcessSpec build_counterexample_mds(const ExponentParams& params, const FSpec& f, std::int64_t n_max);

/// One coin per block: X_n = 4^{1+k(1/r-1)} with probability
/// p_k = 4^{k(1-p/r)}/f(4^{1+k(1/r-1)}). Requires 0 < r < 1 <= p.
ProcessSpec build_counterexample_arbitrary(const ExponentParams& params, const FSpec& f,
                                           std::int64_t n_max);

/// i.i.d. sampler over a discrete law. NAViaIndependent always demands centering.
ProcessSpec build_baseline(ProcessKind kind, const std::vector<double>& atoms,
                           const std::vector<double>& probs, std::int64_t n_max,
                           bool require_centered = false);

ProcessSpec rademacher(std::int64_t n_max);

/// The zero process on [1, n_max].
ProcessSpec zero_process(std::int64_t n_max);

struct SamplePath {
  std::vector<double> x;
  std::vector<double> s;  // S_n
  std::vector<double> m;  // max_{i<=n} |S_i|
};

/// Draw-order contract: blocks in index order; a shared draw (or Z_k) is taken
/// at the first index of its block; degenerate laws consume no randomness.
class PathSampler {
 public:
  explicit PathSampler(const ProcessSpec& spec);

  /// Calls visit(n, x_n) for n = 1 .. n_steps.
  template <class Visit>
  void run(std::int64_t n_steps, RandomStream& rng, Visit&& visit) const;

 private:
  struct Table {
    std::int64_t first, last;
    Coupling coupling;
    std::vector<double> values, cum;
    std::vector<double> sign_values, sign_cum;
  };
  static double pick(const std::vector<double>& values, const std::vector<double>& cum, double u) {
    std::size_t i = 0;
    while (i + 1 < cum.size() && u >= cum[i]) ++i;
    return values[i];
  }

  [[noreturn]] void throw_horizon(std::int64_t n) const;

  std::vector<Table> tables_;
  std::int64_t n_max_;
};

SamplePath sample_path(const ProcessSpec& spec, std::int64_t n, RandomStream& stream);

/// sum over atoms of |atom|^{q} f(|atom|) P(X_n = atom).
double exact_moment(const ProcessSpec& spec, std::int64_t n, double q_exp, const FSpec& f);
double exact_moment(const ProcessSpec& spec, std::int64_t n, double q_exp);

// ---------------------------------------------------------------------------

template <class Visit>
void PathSampler::run(std::int64_t n_steps, RandomStream& rng, Visit&& visit) const {
  if (n_steps > n_max_) throw_horizon(n_steps);
  for (const auto& t : tables_) {
    if (t.first > n_steps) break;
    const std::int64_t last = std::min(t.last, n_steps);
    switch (t.coupling) {
      case Coupling::Independent:
        if (t.values.size() == 1) {
          for (std::int64_t n = t.first; n <= last; ++n) visit(n, t.values[0]);
        } else {
          for (std::int64_t n = t.first; n <= last; ++n) visit(n, pick(t.values, t.cum, rng.uniform()));
        }
        break;
      case Coupling::Shared: {
        const double v = t.values.size() == 1 ? t.values[0] : pick(t.values, t.cum, rng.uniform());
        for (std::int64_t n = t.first; n <= last; ++n) visit(n, v);
        break;
      }
      case Coupling::SignTimesShared: {
        const double z = t.values.size() == 1 ? t.values[0] : pick(t.values, t.cum, rng.uniform());
        if (z == 0.0) {
          for (std::int64_t n = t.first; n <= last; ++n) visit(n, 0.0);
        } else {
          for (std::int64_t n = t.first; n <= last; ++n) {
            visit(n, z * pick(t.sign_values, t.sign_cum, rng.uniform()));
          }
        }
        break;
      }
    }
  }
}

}  // namespace bklab
