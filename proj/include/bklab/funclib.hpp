#pragma once

// Slowly varying moment envelopes: log-tower functions, dyadic sum tests, and
// the regularization constructions that turn a summable 1/g(2^n) into
// envelopes with controlled ratios, smoothness, concavity and convexity.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace bklab::funclib {

/// max{1, ln x}, with log_plus(0) = 1.
double log_plus(double x);

/// k-fold iterate of log_plus; k = 0 is the identity.
double iterated_log_plus(int k, double x);

/// f_{m,eps}(x) = prod_{k=1..m} log+_k(x) * (log+_m(x))^eps.
double eval_log_tower(int m, double eps, double x);

/// Same function, taking ln x so that arguments such as 4^(10^6) stay finite.
double eval_log_tower_at_log(int m, double eps, double ln_x);

/// A non-decreasing positive function on [0, 2^N] known through its values
/// at 2^1 .. 2^N. Evaluation beyond 2^N throws HorizonExceeded.
class DyadicFunction {
 public:
  enum class Interpolation { PiecewiseConstant, Analytic };

  /// values[i] is the value at 2^(i+1); below_2 is used on [0, 2).
  static DyadicFunction from_values(std::vector<double> values, double below_2);
  static DyadicFunction from_values(std::vector<double> values);
  static DyadicFunction from_analytic(std::function<double(double)> fn, int horizon);
  static DyadicFunction log_tower(int m, double eps, int horizon);
  static DyadicFunction constant(double value, int horizon);

  int horizon() const noexcept { return static_cast<int>(values_.size()); }
  double upper() const noexcept;
  double below_two() const noexcept { return below_2_; }
  Interpolation interpolation() const noexcept { return interp_; }
  const std::vector<double>& dyadic_values() const noexcept { return values_; }

  /// Value at 2^n for 1 <= n <= horizon.
  double at_dyadic(int n) const;

  double operator()(double x) const;

 private:
  DyadicFunction(std::vector<double> values, double below_2, Interpolation interp,
                 std::function<double(double)> fn);
  void validate() const;

  std::vector<double> values_;
  double below_2_ = 1.0;
  Interpolation interp_ = Interpolation::PiecewiseConstant;
  std::function<double(double)> fn_;
};

enum class DyadicForm {
  Dyadic = 1,            // 1 / f(2^{cn})
  ScaledDyadic = 2,      // 1 / f(eps 2^{cn})
  Polynomial = 3,        // 1 / (n f(n^c))
  ScaledPolynomial = 4,  // 1 / (n f(eps n^c))
};

/// Partial sums (n = 1..N) of one of the four equivalent summability tests.
std::vector<double> dyadic_sum_test(const std::function<double(double)>& f, DyadicForm form,
                                    double c, double eps, int N);

/// A positive non-increasing sequence a_1..a_N together with an upper bound
/// on its tails sum_{n >= m} a_n, which finite data cannot certify itself.
struct SummableSeq {
  std::function<double(int)> term;
  std::function<double(int)> tail_bound;
  int horizon = 0;

  static SummableSeq geometric(double ratio, int horizon);
  /// a_n = 1 / (n ln^2(n+1)).
  static SummableSeq inverse_n_log_squared(int horizon);
  /// a_n = 1 / f_{m,eps}(2^n), eps > 0.
  static SummableSeq log_tower_reciprocal(int m, double eps, int horizon);
  /// a_n = 1 / g(2^n) with a caller-supplied tail majorant.
  static SummableSeq reciprocal_dyadic(const DyadicFunction& g, std::function<double(int)> tail);

  void validate() const;
};

/// Integral majorant of sum_{n >= m} 1/f_{m_tower,eps}(2^n); +inf where it
/// does not apply (eps = 0 or the iterated logs are still clamped at 1).
double log_tower_reciprocal_tail(int m_tower, double eps, int m);

/// Default c_k = 1 - 1/(k+1).
double default_schedule_c(int k);

struct RegularizationSchedule {
  std::function<double(int)> c;
  /// n_1 < n_2 < ...; breaks that fall beyond the horizon are not listed.
  std::vector<int> n_breaks;
  /// True when every listed break satisfies both defining inequalities.
  bool certified = false;

  /// Block k with n_k < n <= n_{k+1}; 0 when n <= n_1. Past the last listed
  /// break the last block continues to the horizon.
  int block_of(int n) const;
};

struct ScheduleRule {
  std::function<double(int)> c = default_schedule_c;
  /// When non-empty these breaks are used verbatim instead of the greedy choice.
  std::vector<int> forced_breaks;
};

struct Regularized {
  std::vector<double> b;  // b[i] is b_{i+1}
  RegularizationSchedule schedule;
};

/// b_n = a_n for n <= n_1, b_n = max{a_n, c_k b_{n-1}} on block k.
Regularized regularize_sequence(const SummableSeq& a, const ScheduleRule& rule = {});

struct RegularizationReport {
  std::size_t domination_violations = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t ratio_violations = 0;
  double tail_sum = 0.0;  // sum_{n = n_1}^{N} b_n
  bool tail_ok = false;   // tail_sum <= 3 + 1e-9
  bool ok() const {
    return domination_violations == 0 && monotonicity_violations == 0 &&
           ratio_violations == 0 && tail_ok;
  }
};

RegularizationReport check_regularization(const SummableSeq& a, const Regularized& reg);

struct RatioSmoothed {
  DyadicFunction f;
  RegularizationSchedule schedule;
};

/// f(2^n) = 1/b_n where b regularizes a_n = 1/g(2^n); extended piecewise
/// constant (right-continuous) between dyadic points.
RatioSmoothed ratio_smooth(const DyadicFunction& g, std::function<double(int)> tail_bound,
                           const ScheduleRule& rule = {});

/// C^2 interpolation of dyadic values: on [2^n, 2^{n+1}] the derivative is
/// q_n (1 - cos(2^{1-n} pi (x - 2^n))), q_n = 2^{-n}(f(2^{n+1}) - f(2^n)).
class SmoothEnvelope {
 public:
  explicit SmoothEnvelope(DyadicFunction base);

  double value(double x) const;
  double deriv1(double x) const;
  double deriv2(double x) const;

  /// q_n for 1 <= n < horizon.
  double q(int n) const;
  int horizon() const noexcept { return base_.horizon(); }
  double upper() const noexcept { return base_.upper(); }
  const DyadicFunction& base() const noexcept { return base_; }

  /// n with 2^n <= x <= 2^{n+1} (clamped to the last block); 0 below 2.
  int block_of(double x) const;

 private:
  void check_domain(double x) const;

  DyadicFunction base_;
  std::vector<double> q_;  // q_[n-1] = q_n
};

SmoothEnvelope smooth_c2_envelope(const DyadicFunction& g);

struct SmoothnessReport {
  std::size_t samples = 0;
  std::size_t derivative_violations = 0;
  std::size_t growth_violations = 0;
  double max_err1 = 0.0;  // worst |f' - FD| relative to the block scale
  double max_err2 = 0.0;
  bool ok() const { return derivative_violations == 0 && growth_violations == 0; }
};

/// Finite-difference and growth-bound audit at `samples` random interior points.
SmoothnessReport check_smoothness(const SmoothEnvelope& env, std::size_t samples,
                                  std::uint64_t seed, double rel_tol = 1e-5);

/// Geometric grid 2^{j/64}, j >= 0, up to `upper`.
std::vector<double> scan_grid(double upper);

/// x -> x^e f(x) above `threshold`, affine below it.
struct PowerEnvelope {
  double exponent = 1.0;
  double threshold = 1.0;
  double affine_slope = 0.0;
  double threshold_value = 0.0;
  double upper = 0.0;
  std::function<double(double)> power;

  double operator()(double x) const;
  double at_zero() const { return threshold_value - affine_slope * threshold; }
};

/// Concave increasing envelope of x^p f(x), 0 < p < 1.
PowerEnvelope power_concave(const SmoothEnvelope& f, double p);

/// Convex increasing envelope of x^q f(x), q > 1.
PowerEnvelope power_convex(const SmoothEnvelope& f, double q);

/// Smallest grid point after which x^{-c} f(x) is strictly decreasing.
double decreasing_after(const SmoothEnvelope& f, double c);

struct ShapeReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double continuity_rel_err = 0.0;
  bool ok() const { return violations == 0 && continuity_rel_err <= 1e-10; }
};

/// Sign of sampled second divided differences from just below the threshold
/// to the top of the domain, plus continuity at the threshold.
ShapeReport check_power_envelope(const PowerEnvelope& env, bool concave);

/// h(x) = x f(x) piecewise linear and convex, with f(2^n) = b_n where
/// b_{n+2} = max{a_{n+2}, (3/2) b_{n+1} - (1/2) b_n} and a_n = g(2^n).
class PiecewiseConvexEnvelope {
 public:
  explicit PiecewiseConvexEnvelope(std::vector<double> a);

  const std::vector<double>& a() const noexcept { return a_; }
  const std::vector<double>& b() const noexcept { return b_; }
  /// d[0] = b_1, d[n] = 2 b_{n+1} - b_n.
  const std::vector<double>& slopes() const noexcept { return d_; }
  int horizon() const noexcept { return static_cast<int>(b_.size()); }
  double upper() const noexcept;

  double f(double x) const;
  double h(double x) const;
  DyadicFunction as_dyadic() const;

 private:
  std::vector<double> a_, b_, d_;
};

PiecewiseConvexEnvelope convex_linear_envelope(const DyadicFunction& g);

struct ConvexEnvelopeReport {
  std::size_t monotonicity_violations = 0;
  std::size_t ratio_violations = 0;
  std::size_t slope_violations = 0;
  std::size_t continuity_violations = 0;
  double max_ratio = 0.0;
  bool ok() const {
    return monotonicity_violations == 0 && ratio_violations == 0 && slope_violations == 0 &&
           continuity_violations == 0;
  }
};

ConvexEnvelopeReport check_convex_envelope(const PiecewiseConvexEnvelope& env);

struct SqrtComposition {
  DyadicFunction f;                       // f(x) = f*(x^2)
  PiecewiseConvexEnvelope linear;         // built on g*(x) = g(sqrt x)
  std::optional<SmoothEnvelope> smooth;   // present when q > 1
  PowerEnvelope power;                    // f_q(x) = x^q f(sqrt x) above threshold
  double threshold = 0.0;
};

SqrtComposition sqrt_compose(const DyadicFunction& g, double q);

}  // namespace bklab::funclib
