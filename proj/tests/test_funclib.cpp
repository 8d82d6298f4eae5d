#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bklab/error.hpp"
#include "bklab/funclib.hpp"

using namespace bklab;
using namespace bklab::funclib;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const LabError& e) {
    return e.kind();
  }
  FAIL("expected a LabError");
  return ErrorKind::Validation;
}

}  // namespace

TEST_CASE("log tower values") {
  CHECK(log_plus(0.0) == 1.0);
  CHECK(log_plus(2.0) == 1.0);
  CHECK(eval_log_tower(1, 0.0, 1.0) == 1.0);
  CHECK(eval_log_tower(1, 0.0, 32.0) == doctest::Approx(3.4657359027997265).epsilon(1e-14));
  CHECK(eval_log_tower(1, 1.0, 16.0) == doctest::Approx(7.687248222691222).epsilon(1e-14));
  // x = e^{e^2}: log+ x = e^2, log+ log+ x = 2.
  const double x = std::exp(std::exp(2.0));
  CHECK(eval_log_tower(2, 0.0, x) == doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-12));
  CHECK(eval_log_tower(2, 1.0, x) == doctest::Approx(4.0 * std::exp(2.0)).epsilon(1e-12));
  CHECK(iterated_log_plus(0, 5.0) == 5.0);
  for (double v : {0.5, 3.0, 1e5, 1e300}) {
    CHECK(eval_log_tower_at_log(3, 0.5, std::log(v)) == doctest::Approx(eval_log_tower(3, 0.5, v)).epsilon(1e-13));
  }
  // Arguments far beyond binary64 range stay finite through the log form.
  const double huge = eval_log_tower_at_log(1, 0.0, 1e6 * std::log(4.0));
  CHECK(huge == doctest::Approx(1e6 * std::log(4.0)));
}

TEST_CASE("dyadic function domain") {
  const auto f = DyadicFunction::from_values({1.0, 2.0, 3.0});
  CHECK(f(0.0) == 1.0);
  CHECK(f(3.9) == 1.0);
  CHECK(f(4.0) == 2.0);
  CHECK(f(8.0) == 3.0);
  CHECK(kind_of([&] { (void)f(8.5); }) == ErrorKind::HorizonExceeded);
  CHECK(kind_of([] { (void)DyadicFunction::from_values({2.0, 1.0}); }) == ErrorKind::Validation);
  CHECK(kind_of([] { (void)DyadicFunction::from_values({0.0, 1.0}); }) == ErrorKind::Validation);
}

TEST_CASE("dyadic sum tests") {
  const auto f1 = [](double x) { return eval_log_tower(1, 0.0, x); };
  const auto s = dyadic_sum_test(f1, DyadicForm::Dyadic, 1.0, 1.0, 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.7213475204444817).epsilon(1e-12));

  const auto one = dyadic_sum_test([](double) { return 1.0; }, DyadicForm::Dyadic, 1.0, 1.0, 3);
  CHECK(one == std::vector<double>{1.0, 2.0, 3.0});

  const auto f11 = [](double x) { return eval_log_tower(1, 1.0, x); };
  const auto p = dyadic_sum_test(f11, DyadicForm::Dyadic, 1.0, 1.0, 400);
  const int N = 50;
  const double tail = p.back() - p[N - 2];
  const double ln2 = std::numbers::ln2;
  CHECK(tail <= 1.0 / (ln2 * ln2 * (N - 1)));

  const auto poly = dyadic_sum_test(f1, DyadicForm::Polynomial, 1.0, 1.0, 3);
  CHECK(poly[2] == doctest::Approx(1.0 + 1.0 / 2.0 + 1.0 / (3.0 * std::log(3.0))));
}

TEST_CASE("regularize geometric with forced break") {
  const auto a = SummableSeq::geometric(0.5, 12);
  ScheduleRule rule;
  rule.forced_breaks = {2};
  const auto reg = regularize_sequence(a, rule);
  for (int n = 1; n <= 12; ++n) CHECK(reg.b[n - 1] == std::ldexp(1.0, -n));
  CHECK(check_regularization(a, reg).ok());
}

TEST_CASE("regularize 1/(n ln^2(n+1)) on 1e5 terms") {
  const auto a = SummableSeq::inverse_n_log_squared(100000);
  const auto reg = regularize_sequence(a);
  REQUIRE(!reg.schedule.n_breaks.empty());
  CHECK(reg.schedule.n_breaks.front() == 405);
  CHECK(reg.schedule.certified);
  const auto rep = check_regularization(a, reg);
  CHECK(rep.domination_violations == 0);
  CHECK(rep.monotonicity_violations == 0);
  CHECK(rep.ratio_violations == 0);
  CHECK(rep.tail_sum <= 3.0 + 1e-9);
  CHECK(rep.ok());
}

TEST_CASE("regularize reports infeasible schedules") {
  const auto a = SummableSeq::geometric(0.999, 10);
  CHECK(kind_of([&] { (void)regularize_sequence(a); }) == ErrorKind::Infeasible);
}

TEST_CASE("ratio smoothing") {
  std::vector<double> v;
  for (int n = 1; n <= 40; ++n) v.push_back(std::ldexp(1.0, n));
  const auto g = DyadicFunction::from_values(v);
  const auto sm = ratio_smooth(g, [](int m) { return std::ldexp(1.0, 1 - m); });
  for (int n = 1; n <= 40; ++n) CHECK(sm.f.at_dyadic(n) <= g.at_dyadic(n));

  const auto g11 = DyadicFunction::log_tower(1, 1.0, 60);
  const auto s11 = ratio_smooth(g11, [](int m) { return log_tower_reciprocal_tail(1, 1.0, m); });
  for (int n = 2; n <= 60; ++n) {
    CHECK(s11.f.at_dyadic(n) <= g11.at_dyadic(n) * (1 + 1e-15));
    const int k = s11.schedule.block_of(n);
    if (k >= 1) CHECK(s11.f.at_dyadic(n - 1) / s11.f.at_dyadic(n) >= s11.schedule.c(k) * (1 - 1e-12));
  }
}

TEST_CASE("C2 smoothing closed forms") {
  const auto env = smooth_c2_envelope(DyadicFunction::from_values({1.0, 2.0}));
  CHECK(env.q(1) == 0.5);
  CHECK(env.value(3.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(env.value(1.0) == 1.0);
  CHECK(env.value(4.0) == 2.0);
  CHECK(env.deriv1(2.0) == 0.0);

  const auto g = DyadicFunction::log_tower(1, 1.0, 60);
  const auto s = smooth_c2_envelope(g);
  for (int n = 1; n <= 59; ++n) {
    CHECK(s.value(std::ldexp(1.0, n)) == g.at_dyadic(n));
    CHECK(s.deriv1(std::ldexp(1.0, n)) == 0.0);
    CHECK(s.q(n) >= 0.0);
  }
  const auto rep = check_smoothness(s, 1000, 7);
  CHECK(rep.samples == 1000);
  CHECK(rep.derivative_violations == 0);
  CHECK(rep.growth_violations == 0);
}

TEST_CASE("concave power envelope") {
  const auto c = smooth_c2_envelope(DyadicFunction::constant(2.0, 20));
  const auto env = power_concave(c, 0.5);
  CHECK(env.threshold == 1.0);
  CHECK(env.at_zero() == doctest::Approx(1.0));
  CHECK(check_power_envelope(env, true).ok());

  const auto s = smooth_c2_envelope(DyadicFunction::log_tower(1, 1.0, 250));
  const auto e8 = power_concave(s, 0.8);
  CHECK(e8.at_zero() > 0.0);
  CHECK(e8(e8.threshold) == doctest::Approx(e8.power(e8.threshold)).epsilon(1e-10));
  CHECK(check_power_envelope(e8, true).ok());

  // f(x) ~ x makes x^0.8 f(x) convex between dyadic points, so only the last
  // block (where f' and f'' vanish at the endpoint) survives.
  std::vector<double> lin;
  for (int n = 1; n <= 30; ++n) lin.push_back(std::ldexp(1.0, n));
  const auto steep = smooth_c2_envelope(DyadicFunction::from_values(lin));
  const auto top = power_concave(steep, 0.8);
  CHECK(top.threshold > std::ldexp(1.0, 29));
  CHECK(check_power_envelope(top, true).ok());
}

TEST_CASE("convex power envelope") {
  const auto one = smooth_c2_envelope(DyadicFunction::constant(1.0, 20));
  const auto sq = power_convex(one, 2.0);
  CHECK(sq.threshold == 1.0);
  CHECK(sq.at_zero() > 0.0);
  CHECK(check_power_envelope(sq, false).ok());

  const auto s = smooth_c2_envelope(DyadicFunction::log_tower(1, 1.0, 60));
  const auto e3 = power_convex(s, 3.0);
  CHECK(e3.threshold > 1.0);
  CHECK(e3.threshold < 16.0);
  CHECK(e3.affine_slope > 0.0);
  CHECK(e3.at_zero() > 0.0);
  CHECK(check_power_envelope(e3, false).ok());
}

TEST_CASE("decreasing after") {
  const auto one = smooth_c2_envelope(DyadicFunction::constant(1.0, 20));
  CHECK(decreasing_after(one, 1.0) == 1.0);

  const auto s = smooth_c2_envelope(DyadicFunction::log_tower(1, 0.0, 60));
  const double R = decreasing_after(s, 0.5);
  CHECK(R >= std::exp(2.0) / std::exp2(1.0 / 64.0));
  double prev = std::pow(R, -0.5) * s.value(R);
  for (int i = 1; i <= 1000; ++i) {
    const double x = R * std::pow(s.upper() / R, i / 1000.0);
    const double h = std::pow(x, -0.5) * s.value(x);
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("convex linear envelope") {
  const auto flat = convex_linear_envelope(DyadicFunction::from_values(std::vector<double>(10, 1.0)));
  for (double b : flat.b()) CHECK(b == 1.0);
  for (double d : flat.slopes()) CHECK(d == 1.0);
  CHECK(flat.h(5.0) == doctest::Approx(5.0));
  CHECK(check_convex_envelope(flat).ok());

  const auto step = convex_linear_envelope(DyadicFunction::from_values({1.0, 1.0, 4.0, 4.0, 4.0}));
  CHECK(step.b()[2] == 4.0);
  CHECK(step.b()[3] == 5.5);
  CHECK(check_convex_envelope(step).ok());

  const auto g = convex_linear_envelope(DyadicFunction::log_tower(1, 1.0, 60));
  const auto rep = check_convex_envelope(g);
  CHECK(rep.max_ratio <= 2.0);
  CHECK(rep.ok());
}

TEST_CASE("sqrt composition") {
  const auto flat = sqrt_compose(DyadicFunction::from_values(std::vector<double>(12, 1.0)), 1.0);
  for (int n = 1; n <= flat.f.horizon(); ++n) CHECK(flat.f.at_dyadic(n) == doctest::Approx(1.0));
  CHECK(flat.power.at_zero() > 0.0);

  const auto g = DyadicFunction::log_tower(1, 0.0, 40);
  const auto comp = sqrt_compose(g, 2.0);
  CHECK(comp.smooth.has_value());
  CHECK(check_power_envelope(comp.power, false).ok());
  // f(2^n) = f*(4^n) >= f*(2^n), so the composed reciprocal sum is no larger.
  for (int n = 1; n <= comp.f.horizon() / 2; ++n) {
    CHECK(comp.f.at_dyadic(n) >= comp.linear.as_dyadic().at_dyadic(n) * (1 - 1e-12));
  }
}
