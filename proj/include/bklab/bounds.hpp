#pragma once

// Closed-form maximal inequalities (Doob, Markov, Shao's bound for negatively
// associated sums) and their comparison with simulated tails.

#include "bklab/montecarlo.hpp"

namespace bklab {

struct ShaoInputs {
  double x = 1.0;
  double a = 1.0;
  double alpha = 0.5;
  double B = 1.0;      // sum_{i<=n} E X_i^2
  double p_max = 0.0;  // P(max_{i<=n} |X_i| > a)

  void validate() const;
};

/// exp(-x^2 alpha / (2(a x + B)) * (1 + (2/3) ln(1 + a x / B))).
double shao_exponential_factor(const ShaoInputs& in);

/// Upper bound on P(M_n >= x): 2 p_max + 2/(1 - alpha) * exponential factor.
double shao_bound(const ShaoInputs& in);

/// moment / t^p, bounding P(M_n >= t) when moment = E|S_n|^p for a martingale.
double doob_bound(double moment, double t, double p);

/// g_moment / g_at_t.
double markov_bound(double g_moment, double g_at_t);

struct ViolationReport {
  double bound = 0.0;
  double ci_low = 0.0;
  double margin = 0.0;  // bound - ci_low
  bool violated = false;
};

/// Flags a significant breach: the bound lies below the interval's lower end.
ViolationReport empirical_violation(double bound, const TailEstimate& est);

}  // namespace bklab
