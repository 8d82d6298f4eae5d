#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"

#include "bklab/error.hpp"
#include "bklab/exact.hpp"

using namespace bklab;

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

const FSpec f1 = FSpec::log_tower(1, 0.0);

}  // namespace

TEST_CASE("law of S_4 for the independent counterexample") {
  const auto spec = build_counterexample_independent({1.0, 1.0, 1.0}, f1, 1 << 8);
  const auto law = exact_sum_law(spec, 4);
  REQUIRE(law.size() == 3);
  const double p2 = 0.022542110013890053;
  CHECK(law.entries[0].value == -16.0);
  CHECK(law.entries[0].prob == doctest::Approx(p2).epsilon(1e-14));
  CHECK(law.entries[1].prob == doctest::Approx(1.0 - 2.0 * p2).epsilon(1e-14));
  CHECK(law.total() == doctest::Approx(1.0));
  CHECK(exact_tail_S(spec, 4, 4.0) == doctest::Approx(0.045084220027780106).epsilon(1e-13));
  CHECK(exact_tail_S(spec, 3, 0.0) == 0.0);
}

TEST_CASE("Rademacher laws and tails") {
  const auto rad = rademacher(64);
  const auto two = exact_sum_law(rad, 2);
  REQUIRE(two.size() == 3);
  CHECK(two.entries[0].prob == doctest::Approx(0.25));
  CHECK(two.entries[1].prob == doctest::Approx(0.5));
  CHECK(exact_abs_moment_S(rad, 2, 2.0) == doctest::Approx(2.0));
  CHECK(exact_second_moment_sum(rad, 17) == doctest::Approx(17.0));

  CHECK(exact_tail_M(rad, 3, 1.5) == doctest::Approx(0.5));
  CHECK(exact_tail_M(rad, 12, 4.0) == doctest::Approx(0.2919921875).epsilon(1e-14));
  CHECK(exact_tail_S(rad, 12, 4.0) == doctest::Approx(0.14599609375).epsilon(1e-14));
  CHECK(exact_tail_S(rad, 12, 4.0, Comparison::GreaterEqual) >= exact_tail_S(rad, 12, 4.0));
  for (int n = 1; n <= 10; ++n) {
    for (double t : {0.5, 1.0, 2.0, 3.5}) CHECK(exact_tail_M(rad, n, t) >= exact_tail_S(rad, n, t) - 1e-15);
  }
  CHECK(kind_of([&] { (void)exact_tail_M(rad, 13, 1.0); }) == ErrorKind::HorizonExceeded);
  CHECK(kind_of([&] { (void)exact_sum_law(rad, 64, 10); }) == ErrorKind::HorizonExceeded);
}

TEST_CASE("binomial tails") {
  CHECK(binomial_ge(1, 1) == doctest::Approx(0.5));
  CHECK(binomial_ge(2, 2) == doctest::Approx(0.25));
  CHECK(binomial_ge(4, 2) == doctest::Approx(5.0 / 16.0));
  CHECK(binomial_ge(10, 4) == doctest::Approx(0.171875).epsilon(1e-14));
  CHECK(binomial_ge(33, 8) == doctest::Approx(0.08137782872654498).epsilon(1e-12));
  CHECK(rademacher_pmf(4, 1) == 0.0);
  CHECK(rademacher_pmf(4, 0) == doctest::Approx(0.375));
  double lo = 1.0;
  for (int m = 5; m <= 40; ++m) lo = std::min(lo, binomial_ge(m, 4));
  CHECK(binomial_ge_min(5, 40, 4) == doctest::Approx(lo).epsilon(1e-12));
}

TEST_CASE("martingale differences have zero conditional mean") {
  const auto spec = build_counterexample_mds({1.0, 3.0, 1.0}, f1, 1 << 8);
  // Blocks up to k0 = 2 are zero; the first active block starts at 16.
  for (int n = 16; n <= 19; ++n) CHECK(conditional_mean_check(spec, n, 20) < 1e-12);
  CHECK(conditional_mean_check(rademacher(12), 12) < 1e-15);

  auto bent = spec;
  for (auto& b : bent.blocks) {
    if (b.coupling == Coupling::SignTimesShared) b.sign_atoms = {{-1.0, 0.4}, {1.0, 0.6}};
  }
  CHECK(conditional_mean_check(bent, 18, 20) > 1e-3);
}

TEST_CASE("shared-coin blocks move together") {
  const auto spec = build_counterexample_arbitrary({0.5, 1.0, 1.0}, f1, 1 << 8);
  double mass = 0.0;
  enumerate_paths(spec, 6, [&](const std::vector<double>& x, double prob) {
    mass += prob;
    CHECK(x[4] == x[3]);
    CHECK(x[5] == x[3]);
  });
  CHECK(mass == doctest::Approx(1.0));
}

TEST_CASE("maximum of independent summands") {
  const auto spec = build_counterexample_independent({1.0, 1.0, 1.0}, f1, 1 << 8);
  const double p2 = 0.022542110013890053;
  CHECK(exact_p_max(spec, 5, 1.0) == doctest::Approx(1.0 - std::pow(1.0 - 2.0 * p2, 2.0)).epsilon(1e-13));
  CHECK(exact_p_max(spec, 5, 16.0) == 0.0);
  const auto mds = build_counterexample_mds({1.0, 3.0, 1.0}, f1, 64);
  CHECK(kind_of([&] { (void)exact_p_max(mds, 5, 1.0); }) == ErrorKind::Unsupported);
}
