#include "bklab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bklab/error.hpp"

namespace bklab {

namespace {

constexpr double kLn4 = 2.0 * std::numbers::ln2;

bool same_exponent(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

SeriesLedger assemble_weighted(const std::vector<TailEstimate>& tails,
                               const std::function<double(std::int64_t)>& weight) {
  SeriesLedger ledger;
  double cum = 0.0, low = 0.0, high = 0.0;
  for (std::size_t i = 0; i < tails.size(); ++i) {
    if (i > 0 && tails[i].n <= tails[i - 1].n) {
      fail(ErrorKind::Validation, "series: tails must be sorted by strictly increasing n");
    }
    LedgerRow row;
    row.tail = tails[i];
    row.weight = weight(tails[i].n);
    row.increment = row.weight * tails[i].p_hat;
    cum += row.increment;
    low += row.weight * tails[i].ci_low;
    high += row.weight * tails[i].ci_high;
    row.cum_sum = cum;
    row.cum_low = std::min(low, cum);
    row.cum_high = std::max(high, cum);
    ledger.rows.push_back(row);
  }
  return ledger;
}

SeriesLedger assemble(const ExponentParams& params, const std::vector<TailEstimate>& tails) {
  params.validate();
  return assemble_weighted(tails, [&](std::int64_t n) { return series_weight(params, static_cast<double>(n)); });
}

double DivergenceCertificate::tail_from(int k_from) const noexcept {
  double s = 0.0;
  for (const auto& t : terms) {
    if (t.k >= k_from) s += t.term;
  }
  return s;
}

DivergenceCertificate divergence_certificate(const ProcessSpec& spec, int K) {
  if (!spec.is_counterexample() || !spec.f) {
    fail(ErrorKind::Validation, "divergence certificate needs a counterexample process");
  }
  require(K >= 1, "divergence certificate: K must be >= 1");
  if (K > block_index(spec.n_max) && !spec.certified_beyond_horizon) {
    fail(ErrorKind::HorizonExceeded, "k0 is not certified beyond the process horizon");
  }
  const double r = spec.params.r, p = spec.params.p;
  const FSpec& f = *spec.f;
  DivergenceCertificate cert;
  cert.kind = spec.kind;
  cert.k0 = spec.k0;
  switch (spec.kind) {
    case ProcessKind::CounterexampleIndependent:
      cert.block_scale = spec.c_const * std::exp2(-2.0 * p / r - 3.0);
      break;
    default:
      cert.block_scale = std::exp2(-2.0 * p / r - 1.0);
      break;
  }
  double partial = 0.0;
  for (int k = spec.k0 + 1; k <= K; ++k) {
    CertificateTerm t;
    t.k = k;
    double ln_arg = 0.0;
    switch (spec.kind) {
      case ProcessKind::CounterexampleIndependent:
        t.c = spec.c_const;
        ln_arg = k / r * kLn4;
        break;
      case ProcessKind::CounterexampleArbitrary:
        t.c = 1.0;
        ln_arg = (1.0 + k * (1.0 / r - 1.0)) * kLn4;
        break;
      case ProcessKind::CounterexampleMDS: {
        const std::int64_t quarter = std::int64_t{1} << (2 * (k - 1));
        const std::int64_t level = std::int64_t{1} << k;
        t.c = binomial_ge_min(quarter + 1, 3 * quarter, level);
        ln_arg = k * (1.0 / r - 0.5) * kLn4;
        break;
      }
      default:
        break;
    }
    const double scale = spec.kind == ProcessKind::CounterexampleMDS ? t.c * cert.block_scale : cert.block_scale;
    t.term = scale / f.at_log(ln_arg);
    partial += t.term;
    t.partial = partial;
    cert.terms.push_back(t);
  }
  return cert;
}

DivergenceDiagnostic diagnose_divergence(const std::vector<double>& index, const std::vector<double>& increments,
                                         double target, std::size_t window, double delta) {
  require(index.size() == increments.size(), "diagnose_divergence: length mismatch");
  require(window >= 2, "diagnose_divergence: window must be >= 2");
  require(delta > 0.0, "diagnose_divergence: delta must be positive");
  DivergenceDiagnostic d;
  for (double v : increments) d.partial_sum += v;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = index.size(); i-- > 0 && pts.size() < window;) {
    if (increments[i] > 0.0 && index[i] > 0.0) pts.emplace_back(std::log(index[i]), std::log(increments[i]));
  }
  d.slope = -std::numeric_limits<double>::infinity();
  if (pts.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    if (sxx > 0.0) d.slope = sxy / sxx;
  }
  d.exceeds_target = d.partial_sum > target;
  d.slow_decay = d.slope > -(1.0 + delta);
  d.detected = d.exceeds_target && d.slow_decay;
  return d;
}

SeriesLedger statement1_dyadic(const ProcessSpec& spec, const ExponentParams& params, int N_dyadic,
                               const McOptions& opt) {
  params.validate();
  if (!same_exponent(params.p, params.r)) fail(ErrorKind::Validation, "dyadic form needs p = r");
  require(N_dyadic >= 1 && N_dyadic <= 40, "N_dyadic must lie in [1, 40]");
  const std::int64_t last = std::int64_t{1} << N_dyadic;
  if (last > spec.n_max) fail(ErrorKind::HorizonExceeded, "2^N exceeds the process horizon");
  std::vector<TailEstimate> tails;
  for (int j = 1; j <= N_dyadic; ++j) {
    const std::int64_t n = std::int64_t{1} << j;
    tails.push_back(estimate_tail(spec, n, params.eps * std::exp2(j / params.p), Statistic::M, opt));
  }
  return assemble_weighted(tails, [](std::int64_t) { return 1.0; });
}

std::vector<RateRow> statement1_rate(const ProcessSpec& spec, const ExponentParams& params,
                                     const std::vector<std::int64_t>& anchors, std::int64_t K_window,
                                     const McOptions& opt) {
  params.validate();
  if (!(params.p > params.r) || same_exponent(params.p, params.r)) {
    fail(ErrorKind::Validation, "rate form needs p > r");
  }
  require(!anchors.empty(), "rate form needs at least one anchor");
  require(std::is_sorted(anchors.begin(), anchors.end()), "anchors must be sorted ascending");
  require(anchors.front() >= 1 && anchors.back() <= K_window, "anchors must lie in [1, K_window]");
  require(opt.trials >= 1 && opt.trials <= 0xffffffffull, "trials must lie in [1, 2^32)");
  if (K_window > spec.n_max) fail(ErrorKind::HorizonExceeded, "K_window exceeds the process horizon");

  const std::uint64_t stream_id = hash_combine(static_cast<std::uint64_t>(K_window), 0x52415445u);
  const PathSampler sampler(spec);
  const double inv_r = 1.0 / params.r;
  std::vector<std::uint8_t> hit(anchors.size() * opt.trials, 0);
  parallel_replicas(opt.trials, opt.threads, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<double> scaled(static_cast<std::size_t>(K_window));
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomStream rng(opt.seed, stream_id, static_cast<std::uint32_t>(i));
      double s = 0.0;
      sampler.run(K_window, rng, [&](std::int64_t k, double x) {
        s += x;
        scaled[static_cast<std::size_t>(k - 1)] = std::abs(s) * std::pow(static_cast<double>(k), -inv_r);
      });
      double sup = 0.0;
      std::size_t a = anchors.size();
      for (std::int64_t k = K_window; k >= 1 && a > 0; --k) {
        sup = std::max(sup, scaled[static_cast<std::size_t>(k - 1)]);
        while (a > 0 && anchors[a - 1] == k) {
          --a;
          hit[a * opt.trials + i] = exceeds(sup, params.eps, opt.cmp) ? 1 : 0;
        }
      }
    }
  });

  std::vector<RateRow> rows;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < opt.trials; ++i) hits += hit[a * opt.trials + i];
    RateRow row;
    row.anchor = anchors[a];
    row.window_end = K_window;
    row.estimate = make_mc_estimate(anchors[a], params.eps, Statistic::M, hits, opt.trials);
    row.comparison = std::pow(static_cast<double>(anchors[a]), 1.0 - params.p / params.r);
    row.scaled = row.estimate.p_hat / row.comparison;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bklab
