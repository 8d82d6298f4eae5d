#pragma once

// Seeded Monte Carlo estimates of P(M_n > t) and P(|S_n| > t). Replica i of a
// cell always reads the substream (seed, stream_id, i), so hit counts do not
// depend on the number of worker threads.

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "bklab/classes.hpp"
#include "bklab/exact.hpp"
#include "bklab/generators.hpp"

namespace bklab {

enum class Statistic { M, S };
enum class Provenance { Exact, MonteCarlo };

std::string_view to_string(Statistic s) noexcept;
std::string_view to_string(Provenance p) noexcept;
Statistic parse_statistic(std::string_view name);

struct TailEstimate {
  std::int64_t n = 0;
  double t = 0.0;
  Statistic statistic = Statistic::M;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Provenance provenance = Provenance::MonteCarlo;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

constexpr double kWilsonZ95 = 1.959963984540054;

/// 95% Wilson score interval for hits/trials.
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = kWilsonZ95);

TailEstimate make_mc_estimate(std::int64_t n, double t, Statistic stat, std::uint64_t hits, std::uint64_t trials);
TailEstimate make_exact_estimate(std::int64_t n, double t, Statistic stat, double p);

struct McOptions {
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Comparison cmp = Comparison::Greater;
};

/// stream_id for the cell (n, statistic).
std::uint64_t substream_id(std::int64_t n, Statistic stat) noexcept;

/// Runs body(begin, end) over contiguous replica ranges on up to `threads`
/// workers. Exceptions from workers are rethrown on the caller.
void parallel_replicas(std::uint64_t trials, unsigned threads,
                       const std::function<void(std::uint64_t, std::uint64_t)>& body);

/// M_n or |S_n| for every replica of the cell.
std::vector<double> replica_statistics(const ProcessSpec& spec, std::int64_t n, Statistic stat,
                                       std::uint64_t stream_id, const McOptions& opt);

TailEstimate estimate_tail(const ProcessSpec& spec, std::int64_t n, double t, Statistic stat, const McOptions& opt);

/// One estimate per t from the same replicas (common random numbers).
std::vector<TailEstimate> estimate_tail_multi(const ProcessSpec& spec, std::int64_t n, const std::vector<double>& t_grid,
                                              Statistic stat, const McOptions& opt);

/// One estimate per n in ascending n_grid at t = eps n^{1/r}.
std::vector<TailEstimate> estimate_grid(const ProcessSpec& spec, const ExponentParams& params,
                                        const std::vector<std::int64_t>& n_grid, Statistic stat,
                                        const McOptions& opt);

}  // namespace bklab
