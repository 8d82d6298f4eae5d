#include "bklab/classes.hpp"

#include <cmath>

#include "bklab/error.hpp"

namespace bklab {

std::string_view to_string(DependenceRegime regime) noexcept {
  switch (regime) {
    case DependenceRegime::Arbitrary: return "Arbitrary";
    case DependenceRegime::PairwiseNQD: return "PairwiseNQD";
    case DependenceRegime::NegativelyAssociated: return "NegativelyAssociated";
    case DependenceRegime::MDS: return "MDS";
    case DependenceRegime::IndependentCentered: return "IndependentCentered";
  }
  return "?";
}

DependenceRegime parse_regime(std::string_view name) {
  for (auto r : {DependenceRegime::Arbitrary, DependenceRegime::PairwiseNQD,
                 DependenceRegime::NegativelyAssociated, DependenceRegime::MDS,
                 DependenceRegime::IndependentCentered}) {
    if (name == to_string(r)) return r;
  }
  if (name == "NA") return DependenceRegime::NegativelyAssociated;
  if (name == "ICS") return DependenceRegime::IndependentCentered;
  fail(ErrorKind::Validation, "unknown dependence regime '" + std::string(name) + "'");
}

void ExponentParams::validate() const {
  require(std::isfinite(r) && r > 0.0 && r < 2.0, "exponent params: r must lie in (0,2)");
  require(std::isfinite(p) && p >= r, "exponent params: p must be >= r");
  require(std::isfinite(eps) && eps > 0.0, "exponent params: eps must be positive");
}

void ExponentParams::validate_for(DependenceRegime regime) const {
  validate();
  if (regime == DependenceRegime::Arbitrary && r >= 1.0) {
    fail(ErrorKind::Unsupported,
         "arbitrary sequences need r < 1: X_n = 1 has every moment bounded yet the series diverges");
  }
}

double critical_exponent(DependenceRegime regime, double r, double p) {
  ExponentParams{r, p, 1.0}.validate_for(regime);
  switch (regime) {
    case DependenceRegime::Arbitrary:
      // Markov bound for p < 1, Jensen on |S_n|/n otherwise.
      return std::max(p, (p - r) / (1.0 - r));
    case DependenceRegime::MDS:
      return p <= 2.0 ? p : 2.0 * (p - r) / (2.0 - r);
    case DependenceRegime::IndependentCentered:
      return p;
    case DependenceRegime::PairwiseNQD:
      if (p < 1.0 || p >= 2.0) {
        fail(ErrorKind::Unsupported,
             "pairwise NQD results cover only 1 <= p < 2 (centered pairwise NQD strong-law theorem)");
      }
      return p;
    case DependenceRegime::NegativelyAssociated:
      if (p < 2.0) {
        fail(ErrorKind::Unsupported,
             "negatively associated results cover only p >= 2 (Shao-inequality theorem for centered NA sequences)");
      }
      return p;
  }
  fail(ErrorKind::Validation, "unknown regime");
}

double series_weight(const ExponentParams& params, double n) {
  require(n >= 1.0, "series_weight: n must be >= 1");
  return std::pow(n, params.p / params.r - 2.0);
}

double threshold(const ExponentParams& params, double n) {
  require(n >= 1.0, "threshold: n must be >= 1");
  return params.eps * std::pow(n, 1.0 / params.r);
}

}  // namespace bklab
