#include "bklab/funclib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "bklab/error.hpp"
#include "bklab/random.hpp"

namespace bklab::funclib {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

// Index of the first grid point from which `pred` holds at every later point.
// Throws Infeasible naming the largest violating sample when the last point fails.
template <class Pred>
std::size_t first_persistent(const std::vector<double>& grid, Pred pred, const char* what) {
  std::size_t i = grid.size();
  while (i > 0 && pred(grid[i - 1])) --i;
  if (i == grid.size()) {
    fail(ErrorKind::Infeasible, std::string(what) + " fails at the top of the horizon; largest violating sample x=" +
                                    fmt_double(grid.back()));
  }
  return i;
}

}  // namespace

double log_plus(double x) {
  if (x <= 0.0) return 1.0;
  return std::max(1.0, std::log(x));
}

double iterated_log_plus(int k, double x) {
  require(k >= 0, "iterated_log_plus: k must be non-negative");
  for (int i = 0; i < k; ++i) x = log_plus(x);
  return x;
}

double eval_log_tower_at_log(int m, double eps, double ln_x) {
  require(m >= 1, "log tower: m must be >= 1");
  require(eps >= 0.0, "log tower: eps must be >= 0");
  double level = std::max(1.0, ln_x);  // log+_1
  double product = level;
  for (int k = 2; k <= m; ++k) {
    level = log_plus(level);
    product *= level;
  }
  return eps == 0.0 ? product : product * std::pow(level, eps);
}

double eval_log_tower(int m, double eps, double x) {
  require(x >= 0.0, "log tower: x must be >= 0");
  return eval_log_tower_at_log(m, eps, x > 0.0 ? std::log(x) : -kInf);
}

// ---------------------------------------------------------------------------
// DyadicFunction

DyadicFunction::DyadicFunction(std::vector<double> values, double below_2, Interpolation interp,
                               std::function<double(double)> fn)
    : values_(std::move(values)), below_2_(below_2), interp_(interp), fn_(std::move(fn)) {
  validate();
}

void DyadicFunction::validate() const {
  require(!values_.empty(), "DyadicFunction: horizon must be >= 1");
  require(values_.size() <= 1000, "DyadicFunction: horizon must be <= 1000");
  require(below_2_ > 0.0 && std::isfinite(below_2_), "DyadicFunction: value below 2 must be positive");
  require(below_2_ <= values_.front(), "DyadicFunction: value below 2 exceeds f(2)");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    require(values_[i] > 0.0 && std::isfinite(values_[i]),
            "DyadicFunction: value at 2^" + std::to_string(i + 1) + " must be positive and finite");
    if (i > 0) {
      require(values_[i] >= values_[i - 1],
              "DyadicFunction: values must be non-decreasing (n=" + std::to_string(i + 1) + ")");
    }
  }
}

DyadicFunction DyadicFunction::from_values(std::vector<double> values, double below_2) {
  return DyadicFunction(std::move(values), below_2, Interpolation::PiecewiseConstant, {});
}

DyadicFunction DyadicFunction::from_values(std::vector<double> values) {
  require(!values.empty(), "DyadicFunction: horizon must be >= 1");
  const double b2 = values.front();
  return from_values(std::move(values), b2);
}

DyadicFunction DyadicFunction::from_analytic(std::function<double(double)> fn, int horizon) {
  require(horizon >= 1, "DyadicFunction: horizon must be >= 1");
  std::vector<double> values(static_cast<std::size_t>(horizon));
  for (int n = 1; n <= horizon; ++n) values[n - 1] = fn(std::ldexp(1.0, n));
  const double b2 = fn(0.0);
  return DyadicFunction(std::move(values), b2, Interpolation::Analytic, std::move(fn));
}

DyadicFunction DyadicFunction::log_tower(int m, double eps, int horizon) {
  require(m >= 1 && eps >= 0.0, "log tower: need m >= 1 and eps >= 0");
  return from_analytic([m, eps](double x) { return eval_log_tower(m, eps, x); }, horizon);
}

DyadicFunction DyadicFunction::constant(double value, int horizon) {
  require(horizon >= 1, "DyadicFunction: horizon must be >= 1");
  return from_values(std::vector<double>(static_cast<std::size_t>(horizon), value), value);
}

double DyadicFunction::upper() const noexcept { return std::ldexp(1.0, horizon()); }

double DyadicFunction::at_dyadic(int n) const {
  if (n < 1 || n > horizon()) {
    fail(ErrorKind::HorizonExceeded,
         "DyadicFunction: index 2^" + std::to_string(n) + " outside horizon 2^" + std::to_string(horizon()));
  }
  return values_[static_cast<std::size_t>(n - 1)];
}

double DyadicFunction::operator()(double x) const {
  if (!(x >= 0.0)) fail(ErrorKind::Validation, "DyadicFunction: argument must be >= 0");
  if (x > upper()) {
    fail(ErrorKind::HorizonExceeded,
         "DyadicFunction: x=" + fmt_double(x) + " beyond horizon 2^" + std::to_string(horizon()));
  }
  if (interp_ == Interpolation::Analytic) return fn_(x);
  if (x < 2.0) return below_2_;
  const int n = std::min(std::ilogb(x), horizon());
  return values_[static_cast<std::size_t>(n - 1)];
}

// ---------------------------------------------------------------------------
// Summability tests

std::vector<double> dyadic_sum_test(const std::function<double(double)>& f, DyadicForm form,
                                    double c, double eps, int N) {
  require(c > 0.0, "dyadic_sum_test: c must be positive");
  require(N >= 1, "dyadic_sum_test: N must be >= 1");
  const bool scaled = form == DyadicForm::ScaledDyadic || form == DyadicForm::ScaledPolynomial;
  require(!scaled || eps > 0.0, "dyadic_sum_test: eps must be positive");
  std::vector<double> sums;
  sums.reserve(static_cast<std::size_t>(N));
  double acc = 0.0;
  for (int n = 1; n <= N; ++n) {
    double term = 0.0;
    switch (form) {
      case DyadicForm::Dyadic: term = 1.0 / f(std::exp2(c * n)); break;
      case DyadicForm::ScaledDyadic: term = 1.0 / f(eps * std::exp2(c * n)); break;
      case DyadicForm::Polynomial: term = 1.0 / (n * f(std::pow(static_cast<double>(n), c))); break;
      case DyadicForm::ScaledPolynomial:
        term = 1.0 / (n * f(eps * std::pow(static_cast<double>(n), c)));
        break;
    }
    acc += term;
    sums.push_back(acc);
  }
  return sums;
}

double log_tower_reciprocal_tail(int m_tower, double eps, int m) {
  if (eps <= 0.0 || m < 2) return kInf;
  // On [u0, inf) every iterated log must already exceed 1 so that log+ is a
  // plain log and the integrand is the exact derivative of -L_m^{-eps}/eps.
  const double u0 = (m - 1) * std::numbers::ln2;
  double level = u0;
  for (int k = 1; k < m_tower; ++k) {
    if (level < 1.0) return kInf;
    level = std::log(level);
  }
  if (level < 1.0) return kInf;
  return std::pow(level, -eps) / (eps * std::numbers::ln2);
}

SummableSeq SummableSeq::geometric(double ratio, int horizon) {
  require(ratio > 0.0 && ratio < 1.0, "geometric sequence: ratio must lie in (0,1)");
  SummableSeq s;
  s.term = [ratio](int n) { return std::pow(ratio, n); };
  s.tail_bound = [ratio](int m) { return std::pow(ratio, m) / (1.0 - ratio); };
  s.horizon = horizon;
  return s;
}

SummableSeq SummableSeq::inverse_n_log_squared(int horizon) {
  SummableSeq s;
  auto term = [](int n) {
    const double l = std::log(n + 1.0);
    return 1.0 / (n * l * l);
  };
  s.term = term;
  // a_m + int_m^inf dx / (x ln^2 x) = a_m + 1/ln m for m >= 2.
  s.tail_bound = [term](int m) {
    if (m <= 1) return term(1) + term(2) + 1.0 / std::log(2.0);
    return term(m) + 1.0 / std::log(static_cast<double>(m));
  };
  s.horizon = horizon;
  return s;
}

SummableSeq SummableSeq::log_tower_reciprocal(int m, double eps, int horizon) {
  require(eps > 0.0, "log tower reciprocal: eps must be positive for summability");
  SummableSeq s;
  s.term = [m, eps](int n) { return 1.0 / eval_log_tower_at_log(m, eps, n * std::numbers::ln2); };
  s.tail_bound = [m, eps](int k) { return log_tower_reciprocal_tail(m, eps, k); };
  s.horizon = horizon;
  return s;
}

SummableSeq SummableSeq::reciprocal_dyadic(const DyadicFunction& g, std::function<double(int)> tail) {
  SummableSeq s;
  s.term = [g](int n) { return 1.0 / g.at_dyadic(n); };
  s.tail_bound = std::move(tail);
  s.horizon = g.horizon();
  return s;
}

void SummableSeq::validate() const {
  require(static_cast<bool>(term) && static_cast<bool>(tail_bound), "summable sequence: missing term or tail bound");
  require(horizon >= 1, "summable sequence: horizon must be >= 1");
  double prev = kInf;
  for (int n = 1; n <= horizon; ++n) {
    const double a = term(n);
    require(a > 0.0 && std::isfinite(a), "summable sequence: a_" + std::to_string(n) + " must be positive");
    require(a <= prev, "summable sequence: a_n must be non-increasing (n=" + std::to_string(n) + ")");
    require(tail_bound(n) >= a, "summable sequence: tail bound below a_" + std::to_string(n));
    prev = a;
  }
}

// ---------------------------------------------------------------------------
// Sequence regularization

double default_schedule_c(int k) { return 1.0 - 1.0 / (k + 1.0); }

int RegularizationSchedule::block_of(int n) const {
  const auto it = std::lower_bound(n_breaks.begin(), n_breaks.end(), n);
  return static_cast<int>(it - n_breaks.begin());
}

namespace {

bool tail_condition(const SummableSeq& a, const std::function<double(int)>& c, int k, int n) {
  return a.tail_bound(n) < std::ldexp(1.0 - c(k + 1), -k);
}

bool ratio_condition(const std::function<double(int)>& c, int k, int gap) {
  return std::pow(c(k), gap) <= std::ldexp(1.0 - c(k + 1), -k);
}

}  // namespace

Regularized regularize_sequence(const SummableSeq& a, const ScheduleRule& rule) {
  a.validate();
  require(static_cast<bool>(rule.c), "schedule: missing c_k");
  const int N = a.horizon;
  for (int k = 1; k <= 64; ++k) {
    const double ck = rule.c(k);
    require(ck > 0.0 && ck < 1.0, "schedule: c_k must lie in (0,1)");
    if (k > 1) require(ck > rule.c(k - 1), "schedule: c_k must be strictly increasing");
  }

  Regularized out;
  out.schedule.c = rule.c;
  auto& breaks = out.schedule.n_breaks;

  if (!rule.forced_breaks.empty()) {
    breaks = rule.forced_breaks;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      require(breaks[i] >= 1, "schedule: breaks must be positive");
      if (i > 0) require(breaks[i] > breaks[i - 1], "schedule: breaks must be strictly increasing");
    }
    while (!breaks.empty() && breaks.back() > N) breaks.pop_back();
    require(!breaks.empty(), "schedule: first forced break lies beyond the horizon");
    bool certified = true;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      certified = certified && tail_condition(a, rule.c, k, breaks[i]);
      if (i + 1 < breaks.size()) certified = certified && ratio_condition(rule.c, k, breaks[i + 1] - breaks[i]);
    }
    out.schedule.certified = certified;
  } else {
    int n1 = 0;
    for (int n = 1; n <= N; ++n) {
      if (tail_condition(a, rule.c, 1, n)) {
        n1 = n;
        break;
      }
    }
    if (n1 == 0) {
      fail(ErrorKind::Infeasible, "regularize_sequence: tail bound never drops below 2^-1(1-c_2) within horizon " +
                                      std::to_string(N));
    }
    breaks.push_back(n1);
    for (int k = 1;; ++k) {
      int next = 0;
      for (int n = breaks.back() + 1; n <= N; ++n) {
        if (tail_condition(a, rule.c, k + 1, n) && ratio_condition(rule.c, k, n - breaks.back())) {
          next = n;
          break;
        }
      }
      if (next == 0) break;
      breaks.push_back(next);
    }
    out.schedule.certified = true;
  }

  out.b.resize(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) {
    const double an = a.term(n);
    if (n <= breaks.front()) {
      out.b[n - 1] = an;
    } else {
      const int k = out.schedule.block_of(n);
      out.b[n - 1] = std::max(an, rule.c(k) * out.b[n - 2]);
    }
  }
  return out;
}

RegularizationReport check_regularization(const SummableSeq& a, const Regularized& reg) {
  RegularizationReport rep;
  const auto& b = reg.b;
  const int N = static_cast<int>(b.size());
  const int n1 = reg.schedule.n_breaks.front();
  for (int n = 1; n <= N; ++n) {
    const double bn = b[n - 1];
    if (bn < a.term(n)) ++rep.domination_violations;
    if (n > 1) {
      const double prev = b[n - 2];
      if (bn > prev) ++rep.monotonicity_violations;
      if (n > n1) {
        const double ck = reg.schedule.c(reg.schedule.block_of(n));
        // c_k <= b_n / b_{n-1} <= 1, tested multiplicatively.
        if (bn < ck * prev * (1.0 - 1e-12) || bn > prev) ++rep.ratio_violations;
      }
    }
    if (n >= n1) rep.tail_sum += bn;
  }
  rep.tail_ok = rep.tail_sum <= 3.0 + 1e-9;
  return rep;
}

RatioSmoothed ratio_smooth(const DyadicFunction& g, std::function<double(int)> tail_bound,
                           const ScheduleRule& rule) {
  const auto seq = SummableSeq::reciprocal_dyadic(g, std::move(tail_bound));
  auto reg = regularize_sequence(seq, rule);
  std::vector<double> values(reg.b.size());
  std::transform(reg.b.begin(), reg.b.end(), values.begin(), [](double bn) { return 1.0 / bn; });
  const double b2 = values.front();
  return {DyadicFunction::from_values(std::move(values), b2), std::move(reg.schedule)};
}

// ---------------------------------------------------------------------------
// C^2 envelope

SmoothEnvelope::SmoothEnvelope(DyadicFunction base) : base_(std::move(base)) {
  const int N = base_.horizon();
  require(N >= 2, "smooth envelope: horizon must be >= 2");
  q_.resize(static_cast<std::size_t>(N - 1));
  for (int n = 1; n < N; ++n) {
    q_[n - 1] = std::ldexp(base_.at_dyadic(n + 1) - base_.at_dyadic(n), -n);
  }
}

double SmoothEnvelope::q(int n) const {
  if (n < 1 || n >= horizon()) fail(ErrorKind::HorizonExceeded, "smooth envelope: q_n index out of range");
  return q_[static_cast<std::size_t>(n - 1)];
}

void SmoothEnvelope::check_domain(double x) const {
  if (!(x >= 0.0)) fail(ErrorKind::Validation, "smooth envelope: argument must be >= 0");
  if (x > upper()) {
    fail(ErrorKind::HorizonExceeded,
         "smooth envelope: x=" + fmt_double(x) + " beyond horizon 2^" + std::to_string(horizon()));
  }
}

int SmoothEnvelope::block_of(double x) const {
  check_domain(x);
  if (x < 2.0) return 0;
  return std::min(std::ilogb(x), horizon() - 1);
}

double SmoothEnvelope::value(double x) const {
  const int n = block_of(x);
  if (n == 0) return base_.at_dyadic(1);
  const double t = x - std::ldexp(1.0, n);
  const double w = std::ldexp(kPi, 1 - n);
  return base_.at_dyadic(n) + q_[n - 1] * (t - std::sin(w * t) / w);
}

double SmoothEnvelope::deriv1(double x) const {
  const int n = block_of(x);
  if (n == 0) return 0.0;
  const double t = x - std::ldexp(1.0, n);
  const double w = std::ldexp(kPi, 1 - n);
  return q_[n - 1] * (1.0 - std::cos(w * t));
}

double SmoothEnvelope::deriv2(double x) const {
  const int n = block_of(x);
  if (n == 0) return 0.0;
  const double t = x - std::ldexp(1.0, n);
  const double w = std::ldexp(kPi, 1 - n);
  return q_[n - 1] * w * std::sin(w * t);
}

SmoothEnvelope smooth_c2_envelope(const DyadicFunction& g) { return SmoothEnvelope(g); }

SmoothnessReport check_smoothness(const SmoothEnvelope& env, std::size_t samples, std::uint64_t seed,
                                  double rel_tol) {
  SmoothnessReport rep;
  RandomStream rng(seed, 0x5300'7400'0000'0001ull);
  const int blocks = env.horizon() - 1;
  for (std::size_t i = 0; i < samples; ++i) {
    // Uniform block, then a point kept away from the block ends so that
    // the centered stencil stays inside one smooth piece.
    const int n = 1 + static_cast<int>(rng.uniform() * blocks);
    const double len = std::ldexp(1.0, n);
    const double h = len * 1e-4;
    const double x = len + h + rng.uniform() * (len - 2.0 * h);
    const double f = env.value(x), d1 = env.deriv1(x), d2 = env.deriv2(x);
    const double fd1 = (env.value(x + h) - env.value(x - h)) / (2.0 * h);
    const double fd2 = (env.deriv1(x + h) - env.deriv1(x - h)) / (2.0 * h);
    const double qn = env.q(n);
    const double scale1 = 2.0 * qn;
    const double scale2 = qn * std::ldexp(kPi, 1 - n);
    const double e1 = scale1 > 0.0 ? std::abs(d1 - fd1) / scale1 : std::abs(d1 - fd1);
    const double e2 = scale2 > 0.0 ? std::abs(d2 - fd2) / scale2 : std::abs(d2 - fd2);
    rep.max_err1 = std::max(rep.max_err1, e1);
    rep.max_err2 = std::max(rep.max_err2, e2);
    if (e1 > rel_tol || e2 > rel_tol) ++rep.derivative_violations;

    const double growth = env.base().at_dyadic(n + 1) / env.base().at_dyadic(n) - 1.0;
    const double slack = 1e-12 * (1.0 + growth);
    if (x * d1 / f > 4.0 * growth + slack) ++rep.growth_violations;
    if (x * x * std::abs(d2) / f > 8.0 * kPi * growth + slack) ++rep.growth_violations;
    ++rep.samples;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Power envelopes

std::vector<double> scan_grid(double upper) {
  require(upper >= 1.0, "scan grid: upper bound must be >= 1");
  std::vector<double> grid;
  for (int j = 0;; ++j) {
    const double x = std::exp2(j / 64.0);
    if (x > upper * (1.0 + 1e-15)) break;
    grid.push_back(std::min(x, upper));
  }
  return grid;
}

double PowerEnvelope::operator()(double x) const {
  require(x >= 0.0, "power envelope: argument must be >= 0");
  if (x > upper) fail(ErrorKind::HorizonExceeded, "power envelope: x beyond horizon");
  if (x < threshold) return threshold_value + affine_slope * (x - threshold);
  return power(x);
}

namespace {

struct PowerDerivs {
  double value, d1, d2;
};

PowerDerivs power_derivs(const SmoothEnvelope& f, double e, double x) {
  const double fx = f.value(x), f1 = f.deriv1(x), f2 = f.deriv2(x);
  const double xe = std::pow(x, e);
  return {xe * fx, e * xe / x * fx + xe * f1,
          e * (e - 1.0) * xe / (x * x) * fx + 2.0 * e * xe / x * f1 + xe * f2};
}

}  // namespace

PowerEnvelope power_concave(const SmoothEnvelope& f, double p) {
  require(p > 0.0 && p < 1.0, "power_concave: p must lie in (0,1)");
  const auto grid = scan_grid(f.upper());
  const std::size_t k_idx = first_persistent(
      grid, [&](double x) { return power_derivs(f, p, x).d2 < 0.0; }, "power_concave: f_p'' < 0");
  const std::size_t l_idx = first_persistent(
      grid,
      [&](double x) {
        const auto d = power_derivs(f, p, x);
        return d.d1 > 0.0 && d.d1 / d.value < 1.0 / x;
      },
      "power_concave: 0 < f_p'/f_p < 1/x");
  const double Np = grid[std::max(k_idx, l_idx)];
  const auto at = power_derivs(f, p, Np);
  PowerEnvelope env;
  env.exponent = p;
  env.threshold = Np;
  env.affine_slope = at.d1;
  env.threshold_value = at.value;
  env.upper = f.upper();
  env.power = [f, p](double x) { return std::pow(x, p) * f.value(x); };
  if (!(env.at_zero() > 0.0)) fail(ErrorKind::Infeasible, "power_concave: envelope at 0 is not positive");
  return env;
}

PowerEnvelope power_convex(const SmoothEnvelope& f, double q) {
  require(q > 1.0, "power_convex: q must exceed 1");
  const auto grid = scan_grid(f.upper());
  const std::size_t idx = first_persistent(
      grid,
      [&](double x) {
        const auto d = power_derivs(f, q, x);
        return d.d2 > 0.0 && d.d1 > 0.0;
      },
      "power_convex: f_q'' > 0 and f_q' > 0");
  const double Nq = grid[idx];
  const auto at = power_derivs(f, q, Nq);
  PowerEnvelope env;
  env.exponent = q;
  env.threshold = Nq;
  env.affine_slope = std::min(at.d1 / 2.0, at.value / Nq / 2.0);
  env.threshold_value = at.value;
  env.upper = f.upper();
  env.power = [f, q](double x) { return std::pow(x, q) * f.value(x); };
  return env;
}

double decreasing_after(const SmoothEnvelope& f, double c) {
  require(c > 0.0, "decreasing_after: c must be positive");
  const auto grid = scan_grid(f.upper());
  const std::size_t idx = first_persistent(
      grid, [&](double x) { return -c * f.value(x) + x * f.deriv1(x) < 0.0; },
      "decreasing_after: (x^-c f)' < 0");
  return grid[idx];
}

ShapeReport check_power_envelope(const PowerEnvelope& env, bool concave) {
  ShapeReport rep;
  std::vector<double> pts = {env.threshold / 2.0, env.threshold};
  for (double x : scan_grid(env.upper)) {
    if (x > env.threshold) pts.push_back(x);
  }
  for (std::size_t i = 2; i < pts.size(); ++i) {
    const double x0 = pts[i - 2], x1 = pts[i - 1], x2 = pts[i];
    const double s0 = (env(x1) - env(x0)) / (x1 - x0);
    const double s1 = (env(x2) - env(x1)) / (x2 - x1);
    const double tol = 1e-9 * std::max(std::abs(s0), std::abs(s1));
    const bool ok = concave ? s1 <= s0 + tol : s1 >= s0 - tol;
    if (!ok) ++rep.violations;
    if (s1 <= 0.0) ++rep.violations;  // increasing
    ++rep.checked;
  }
  if (!(env.at_zero() > 0.0)) ++rep.violations;
  const double left = env.threshold_value;
  const double right = env.power(env.threshold);
  rep.continuity_rel_err = std::abs(left - right) / std::max(std::abs(right), 1e-300);
  return rep;
}

// ---------------------------------------------------------------------------
// Piecewise-linear convex envelope

PiecewiseConvexEnvelope::PiecewiseConvexEnvelope(std::vector<double> a) : a_(std::move(a)) {
  require(a_.size() >= 2, "convex envelope: horizon must be >= 2");
  for (std::size_t i = 0; i < a_.size(); ++i) {
    require(a_[i] > 0.0, "convex envelope: values must be positive");
    if (i > 0) require(a_[i] >= a_[i - 1], "convex envelope: values must be non-decreasing");
  }
  const std::size_t N = a_.size();
  b_.resize(N);
  b_[0] = a_[0];
  b_[1] = a_[1];
  for (std::size_t i = 2; i < N; ++i) b_[i] = std::max(a_[i], 1.5 * b_[i - 1] - 0.5 * b_[i - 2]);
  d_.resize(N);
  d_[0] = b_[0];
  for (std::size_t n = 1; n < N; ++n) d_[n] = 2.0 * b_[n] - b_[n - 1];
}

double PiecewiseConvexEnvelope::upper() const noexcept { return std::ldexp(1.0, horizon()); }

double PiecewiseConvexEnvelope::f(double x) const {
  require(x >= 0.0, "convex envelope: argument must be >= 0");
  if (x > upper()) fail(ErrorKind::HorizonExceeded, "convex envelope: x beyond horizon");
  if (x <= 2.0) return b_[0];
  const int n = std::min(std::ilogb(x), horizon() - 1);
  const double t = x - std::ldexp(1.0, n);
  return b_[n - 1] + 2.0 * (b_[n] - b_[n - 1]) * t / x;
}

double PiecewiseConvexEnvelope::h(double x) const {
  require(x >= 0.0, "convex envelope: argument must be >= 0");
  if (x > upper()) fail(ErrorKind::HorizonExceeded, "convex envelope: x beyond horizon");
  if (x <= 2.0) return b_[0] * x;
  const int n = std::min(std::ilogb(x), horizon() - 1);
  const double base = std::ldexp(1.0, n);
  return b_[n - 1] * base + d_[n] * (x - base);
}

DyadicFunction PiecewiseConvexEnvelope::as_dyadic() const {
  return DyadicFunction::from_values(b_, b_[0]);
}

PiecewiseConvexEnvelope convex_linear_envelope(const DyadicFunction& g) {
  return PiecewiseConvexEnvelope(g.dyadic_values());
}

ConvexEnvelopeReport check_convex_envelope(const PiecewiseConvexEnvelope& env) {
  ConvexEnvelopeReport rep;
  const auto& a = env.a();
  const auto& b = env.b();
  const auto& d = env.slopes();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i > 0 && b[i] < b[i - 1]) ++rep.monotonicity_violations;
    const double ratio = b[i] / a[i];
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > 2.0) ++rep.ratio_violations;
  }
  for (std::size_t n = 1; n < d.size(); ++n) {
    if (d[n] < d[n - 1]) ++rep.slope_violations;
  }
  // The affine piece on [2^n, 2^{n+1}] must land on 2^{n+1} b_{n+1}.
  if (!close_rel(env.h(2.0), 2.0 * b[0], 1e-12)) ++rep.continuity_violations;
  for (int n = 1; n < env.horizon(); ++n) {
    const double base = std::ldexp(1.0, n);
    const double from_left = b[n - 1] * base + d[n] * base;
    if (!close_rel(from_left, 2.0 * base * b[n], 1e-12)) ++rep.continuity_violations;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Square-root composition

SqrtComposition sqrt_compose(const DyadicFunction& g, double q) {
  require(q >= 1.0, "sqrt_compose: q must be >= 1");
  const int N = g.horizon();
  require(2 * N <= 1000, "sqrt_compose: horizon too large");
  // g*(2^n) = g(2^{n/2}), n = 1 .. 2N.
  std::vector<double> star(static_cast<std::size_t>(2 * N));
  for (int n = 1; n <= 2 * N; ++n) star[n - 1] = g(std::exp2(n / 2.0));
  PiecewiseConvexEnvelope linear(star);

  std::optional<SmoothEnvelope> smooth;
  PowerEnvelope power;
  std::function<double(double)> f_star;
  if (q == 1.0) {
    // h(x) = x f*(x) is already convex; replace it by an affine piece on [0, 2]
    // with a smaller slope so that the envelope is positive at 0.
    f_star = [linear](double x) { return linear.f(x); };
    power.exponent = 1.0;
    power.threshold = 2.0;
    power.threshold_value = linear.h(2.0);
    power.affine_slope = std::min(linear.slopes()[0] / 2.0, power.threshold_value / 2.0 / 2.0);
    power.upper = linear.upper();
    power.power = [linear](double x) { return linear.h(x); };
  } else {
    smooth.emplace(linear.as_dyadic());
    power = power_convex(*smooth, q);
    const SmoothEnvelope s = *smooth;
    f_star = [s](double x) { return s.value(x); };
  }
  auto f = DyadicFunction::from_analytic([f_star](double x) { return f_star(x * x); }, N);
  const double thr = power.threshold;
  return {std::move(f), std::move(linear), std::move(smooth), std::move(power), thr};
}

}  // namespace bklab::funclib
