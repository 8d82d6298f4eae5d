#pragma once

// Partial sums of sum n^{p/r-2} P(M_n > eps n^{1/r}) assembled from tail
// estimates, the analytic per-block lower bounds that make the counterexample
// series diverge, and finite-horizon surrogates of the dyadic and rate forms.

#include <cstdint>
#include <functional>
#include <vector>

#include "bklab/montecarlo.hpp"

namespace bklab {

struct LedgerRow {
  TailEstimate tail;
  double weight = 0.0;
  double increment = 0.0;  // weight * p_hat
  double cum_sum = 0.0;
  double cum_low = 0.0;
  double cum_high = 0.0;
};

struct SeriesLedger {
  std::vector<LedgerRow> rows;

  double total() const noexcept { return rows.empty() ? 0.0 : rows.back().cum_sum; }
};

/// Weights n^{p/r-2}. Throws Validation unless n strictly increases.
SeriesLedger assemble(const ExponentParams& params, const std::vector<TailEstimate>& tails);

/// Same with caller-chosen weights.
SeriesLedger assemble_weighted(const std::vector<TailEstimate>& tails, const std::function<double(std::int64_t)>& weight);

struct CertificateTerm {
  int k = 0;
  double c = 0.0;  // probability constant of the block
  double term = 0.0;
  double partial = 0.0;
};

struct DivergenceCertificate {
  ProcessKind kind = ProcessKind::CounterexampleIndependent;
  int k0 = 0;
  /// c 2^{-2p/r-3} for the independent construction, 2^{-2p/r-1} otherwise.
  double block_scale = 0.0;
  std::vector<CertificateTerm> terms;  // k = k0+1 .. K

  double partial_sum() const noexcept { return terms.empty() ? 0.0 : terms.back().partial; }
  /// sum of term_k over k >= k_from.
  double tail_from(int k_from) const noexcept;
};

/// Per-block lower bounds on sum_{2 4^{k-1} <= n < 4^k} n^{p/r-2} P(|S_n| > n^{1/r}):
///   independent:  c 2^{-2p/r-3} / f(4^{k/r})
///   arbitrary:    2^{-2p/r-1} / f(4^{1+k(1/r-1)})
///   martingale:   c_k 2^{-2p/r-1} / f(4^{k(1/r-1/2)}), c_k the smallest exact
///                 P(Y_{4^{k-1}} + ... + Y_n >= 2^k) over the block.
DivergenceCertificate divergence_certificate(const ProcessSpec& spec, int K);

struct DivergenceDiagnostic {
  double partial_sum = 0.0;
  double slope = 0.0;  // least-squares slope of log increment against log index
  bool exceeds_target = false;
  bool slow_decay = false;
  bool detected = false;  // a label, not a proof of divergence
};

/// Partial sums beyond `target` and increments decaying slower than
/// index^{-1-delta} over the last `window` positive increments.
DivergenceDiagnostic diagnose_divergence(const std::vector<double>& index, const std::vector<double>& increments,
                                         double target, std::size_t window, double delta);

/// Ledger of P(M_{2^j} > eps 2^{j/p}) for j = 1..N_dyadic with unit weights.
/// Requires p = r.
SeriesLedger statement1_dyadic(const ProcessSpec& spec, const ExponentParams& params, int N_dyadic,
                               const McOptions& opt);

struct RateRow {
  std::int64_t anchor = 0;
  std::int64_t window_end = 0;
  TailEstimate estimate;   // of P(max_{anchor<=k<=window_end} k^{-1/r}|S_k| > eps), a lower bound
  double comparison = 0.0;  // anchor^{1-p/r}
  double scaled = 0.0;      // p_hat * anchor^{p/r-1}
};

/// Finite-window surrogate of P(sup_{k>=n} k^{-1/r}|S_k| > eps) at each anchor,
/// all anchors read from the same replicas. Requires p > r.
std::vector<RateRow> statement1_rate(const ProcessSpec& spec, const ExponentParams& params,
                                     const std::vector<std::int64_t>& anchors, std::int64_t K_window,
                                     const McOptions& opt);

}  // namespace bklab
