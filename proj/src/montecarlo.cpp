#include "bklab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "bklab/error.hpp"

namespace bklab {

std::string_view to_string(Statistic s) noexcept { return s == Statistic::M ? "M" : "S"; }

std::string_view to_string(Provenance p) noexcept { return p == Provenance::Exact ? "exact" : "montecarlo"; }

Statistic parse_statistic(std::string_view name) {
  if (name == "M") return Statistic::M;
  if (name == "S") return Statistic::S;
  fail(ErrorKind::Validation, "statistic must be M or S, got '" + std::string(name) + "'");
}

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z) {
  require(trials >= 1, "wilson_interval: trials must be >= 1");
  require(hits <= trials, "wilson_interval: hits exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (hits == 0) iv.low = 0.0;
  if (hits == trials) iv.high = 1.0;
  iv.low = std::min(iv.low, p);
  iv.high = std::max(iv.high, p);
  return iv;
}

TailEstimate make_mc_estimate(std::int64_t n, double t, Statistic stat, std::uint64_t hits, std::uint64_t trials) {
  const Interval iv = wilson_interval(hits, trials);
  TailEstimate e;
  e.n = n;
  e.t = t;
  e.statistic = stat;
  e.trials = trials;
  e.hits = hits;
  e.p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  e.ci_low = iv.low;
  e.ci_high = iv.high;
  e.provenance = Provenance::MonteCarlo;
  return e;
}

TailEstimate make_exact_estimate(std::int64_t n, double t, Statistic stat, double p) {
  require(p >= 0.0 && p <= 1.0 + 1e-12, "exact tail probability outside [0,1]");
  TailEstimate e;
  e.n = n;
  e.t = t;
  e.statistic = stat;
  e.p_hat = e.ci_low = e.ci_high = std::min(p, 1.0);
  e.provenance = Provenance::Exact;
  return e;
}

std::uint64_t substream_id(std::int64_t n, Statistic stat) noexcept {
  return hash_combine(static_cast<std::uint64_t>(n), stat == Statistic::M ? 0x4du : 0x53u);
}

void parallel_replicas(std::uint64_t trials, unsigned threads,
                       const std::function<void(std::uint64_t, std::uint64_t)>& body) {
  const std::uint64_t workers = std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(trials, 1));
  if (workers == 1) {
    body(0, trials);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex mu;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = trials * w / workers;
    const std::uint64_t end = trials * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> replica_statistics(const ProcessSpec& spec, std::int64_t n, Statistic stat,
                                       std::uint64_t stream_id, const McOptions& opt) {
  require(opt.trials >= 1, "trials must be >= 1");
  require(opt.trials <= 0xffffffffull, "trials must fit in 32 bits");
  require(n >= 1, "n must be >= 1");
  if (n > spec.n_max) fail(ErrorKind::HorizonExceeded, "n=" + std::to_string(n) + " exceeds process horizon");
  const PathSampler sampler(spec);
  std::vector<double> out(opt.trials);
  parallel_replicas(opt.trials, opt.threads, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream rng(opt.seed, stream_id, static_cast<std::uint32_t>(i));
      double s = 0.0, m = 0.0;
      sampler.run(n, rng, [&](std::int64_t, double x) {
        s += x;
        m = std::max(m, std::abs(s));
      });
      out[i] = stat == Statistic::M ? m : std::abs(s);
    }
  });
  return out;
}

std::vector<TailEstimate> estimate_tail_multi(const ProcessSpec& spec, std::int64_t n, const std::vector<double>& t_grid,
                                              Statistic stat, const McOptions& opt) {
  const auto values = replica_statistics(spec, n, stat, substream_id(n, stat), opt);
  std::vector<TailEstimate> out;
  for (double t : t_grid) {
    std::uint64_t hits = 0;
    for (double v : values) hits += exceeds(v, t, opt.cmp) ? 1 : 0;
    out.push_back(make_mc_estimate(n, t, stat, hits, opt.trials));
  }
  return out;
}

TailEstimate estimate_tail(const ProcessSpec& spec, std::int64_t n, double t, Statistic stat, const McOptions& opt) {
  return estimate_tail_multi(spec, n, {t}, stat, opt).front();
}

std::vector<TailEstimate> estimate_grid(const ProcessSpec& spec, const ExponentParams& params,
                                        const std::vector<std::int64_t>& n_grid, Statistic stat,
                                        const McOptions& opt) {
  require(std::is_sorted(n_grid.begin(), n_grid.end()), "n_grid must be sorted ascending");
  std::vector<TailEstimate> out;
  for (std::int64_t n : n_grid) {
    out.push_back(estimate_tail(spec, n, threshold(params, static_cast<double>(n)), stat, opt));
  }
  return out;
}

}  // namespace bklab
