#include "bklab/bounds.hpp"

#include <cmath>

#include "bklab/error.hpp"

namespace bklab {

void ShaoInputs::validate() const {
  require(x > 0.0 && std::isfinite(x), "shao: x must be positive");
  require(a > 0.0 && std::isfinite(a), "shao: a must be positive");
  require(alpha > 0.0 && alpha < 1.0, "shao: alpha must lie in (0,1)");
  require(B > 0.0 && std::isfinite(B), "shao: B_n must be positive");
  require(p_max >= 0.0 && p_max <= 1.0, "shao: p_max must lie in [0,1]");
}

double shao_exponential_factor(const ShaoInputs& in) {
  in.validate();
  const double ax = in.a * in.x;
  const double expo = in.x * in.x * in.alpha / (2.0 * (ax + in.B)) * (1.0 + (2.0 / 3.0) * std::log1p(ax / in.B));
  return std::exp(-expo);
}

double shao_bound(const ShaoInputs& in) {
  return 2.0 * in.p_max + 2.0 / (1.0 - in.alpha) * shao_exponential_factor(in);
}

double doob_bound(double moment, double t, double p) {
  require(moment >= 0.0, "doob: moment must be non-negative");
  require(t > 0.0, "doob: t must be positive");
  require(p >= 1.0, "doob: p must be >= 1");
  return moment / std::pow(t, p);
}

double markov_bound(double g_moment, double g_at_t) {
  require(g_moment >= 0.0, "markov: moment must be non-negative");
  require(g_at_t > 0.0, "markov: g(t) must be positive");
  return g_moment / g_at_t;
}

ViolationReport empirical_violation(double bound, const TailEstimate& est) {
  ViolationReport r;
  r.bound = bound;
  r.ci_low = est.ci_low;
  r.margin = bound - est.ci_low;
  r.violated = bound < est.ci_low;
  return r;
}

}  // namespace bklab
