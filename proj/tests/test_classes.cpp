#include <cmath>
#include <functional>

#include "doctest.h"

#include "bklab/classes.hpp"
#include "bklab/error.hpp"

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

}  // namespace

TEST_CASE("critical exponents") {
  CHECK(critical_exponent(DependenceRegime::MDS, 1.0, 3.0) == doctest::Approx(4.0));
  CHECK(critical_exponent(DependenceRegime::Arbitrary, 0.5, 1.5) == doctest::Approx(2.0));
  CHECK(critical_exponent(DependenceRegime::Arbitrary, 0.5, 0.5) == doctest::Approx(0.5));
  CHECK(critical_exponent(DependenceRegime::MDS, 1.0, 2.0) == 2.0);
  CHECK(critical_exponent(DependenceRegime::IndependentCentered, 1.2, 1.7) == 1.7);
  CHECK(critical_exponent(DependenceRegime::PairwiseNQD, 1.0, 1.5) == 1.5);
  CHECK(critical_exponent(DependenceRegime::NegativelyAssociated, 1.0, 3.0) == 3.0);
}

TEST_CASE("unsupported combinations") {
  CHECK(kind_of([] { (void)critical_exponent(DependenceRegime::Arbitrary, 1.0, 2.0); }) == ErrorKind::Unsupported);
  CHECK(kind_of([] { (void)critical_exponent(DependenceRegime::PairwiseNQD, 1.0, 2.5); }) == ErrorKind::Unsupported);
  CHECK(kind_of([] { (void)critical_exponent(DependenceRegime::NegativelyAssociated, 1.0, 1.5); }) ==
        ErrorKind::Unsupported);
  CHECK(kind_of([] { (void)critical_exponent(DependenceRegime::MDS, 2.0, 3.0); }) == ErrorKind::Validation);
  CHECK(kind_of([] { (void)critical_exponent(DependenceRegime::MDS, 1.0, 0.5); }) == ErrorKind::Validation);
  CHECK(kind_of([] { ExponentParams{1.0, 1.0, 0.0}.validate(); }) == ErrorKind::Validation);
}

TEST_CASE("exponent ordering") {
  for (double r = 0.1; r < 2.0; r += 0.1) {
    for (double p = r; p < 6.0; p += 0.25) {
      const double mds = critical_exponent(DependenceRegime::MDS, r, p);
      CHECK(mds >= p - 1e-12);
      if (p <= 2.0) CHECK(mds == p);
      if (p > 2.0) CHECK(mds > p);
      if (r < 1.0 && p >= 1.0) CHECK(critical_exponent(DependenceRegime::Arbitrary, r, p) >= mds - 1e-12);
    }
  }
}

TEST_CASE("weights and thresholds") {
  CHECK(series_weight({1.0, 2.0, 1.0}, 4.0) == 1.0);
  CHECK(series_weight({1.0, 1.0, 1.0}, 100.0) == doctest::Approx(0.01));
  CHECK(series_weight({1.0, 3.0, 1.0}, 2.0) == doctest::Approx(2.0));
  CHECK(threshold({0.5, 1.0, 1.0}, 9.0) == doctest::Approx(81.0));
  CHECK(threshold({1.0, 1.0, 2.0}, 5.0) == doctest::Approx(10.0));
  CHECK(threshold({2.0, 2.0, 1.0}, 16.0) == doctest::Approx(4.0));
  CHECK(kind_of([] { (void)threshold({1.0, 1.0, 1.0}, 0.5); }) == ErrorKind::Validation);
}

TEST_CASE("regime names") {
  CHECK(parse_regime("MDS") == DependenceRegime::MDS);
  CHECK(parse_regime("NA") == DependenceRegime::NegativelyAssociated);
  CHECK(to_string(DependenceRegime::PairwiseNQD) == "PairwiseNQD");
  CHECK(kind_of([] { (void)parse_regime("iid"); }) == ErrorKind::Validation);
}
