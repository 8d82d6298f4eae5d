#pragma once

// Dependence regimes, exponent parameters and the critical moment exponents
// q(r, p) for each regime, plus the weights and thresholds of the
// n^{p/r-2} P(M_n > eps n^{1/r}) series.

#include <string>
#include <string_view>

namespace bklab {

enum class DependenceRegime {
  Arbitrary,
  PairwiseNQD,
  NegativelyAssociated,
  MDS,
  IndependentCentered,
};

std::string_view to_string(DependenceRegime regime) noexcept;
DependenceRegime parse_regime(std::string_view name);

/// The triple (r, p, eps). Invariants: 0 < r < 2, p >= r, eps > 0.
struct ExponentParams {
  double r = 1.0;
  double p = 1.0;
  double eps = 1.0;

  void validate() const;
  /// Additionally enforces r < 1 for arbitrary sequences (X_n = 1 defeats r >= 1).
  void validate_for(DependenceRegime regime) const;
};

/// Smallest moment order q such that sup E|X_n|^q f(|X_n|) < inf forces the
/// series to converge in the given regime. Throws Unsupported outside the
/// proven range.
double critical_exponent(DependenceRegime regime, double r, double p);

/// n^{p/r - 2}.
double series_weight(const ExponentParams& params, double n);

/// eps n^{1/r}.
double threshold(const ExponentParams& params, double n);

}  // namespace bklab
