#include <cmath>
#include <functional>
#include <numbers>

#include "doctest.h"

#include "bklab/error.hpp"
#include "bklab/generators.hpp"

using namespace bklab;

namespace {

const double kLn4 = 2.0 * std::numbers::ln2;

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

TEST_CASE("block indexing") {
  CHECK(block_index(1) == 1);
  CHECK(block_index(3) == 1);
  CHECK(block_index(4) == 2);
  CHECK(block_index(15) == 2);
  CHECK(block_index(16) == 3);
  CHECK(block_start(3) == 16);
}

TEST_CASE("independent counterexample r = p = 1, f_1") {
  const auto spec = build_counterexample_independent({1.0, 1.0, 1.0}, f1, 1 << 16);
  CHECK(spec.blocks[0].p_k == doctest::Approx(0.18033688011112042).epsilon(1e-14));
  CHECK(spec.c_const == doctest::Approx(0.11485985323342628).epsilon(1e-14));
  CHECK(spec.k0 == 1);
  CHECK(spec.certified_beyond_horizon);
  CHECK(spec.blocks[0].is_zero());
  CHECK(spec.blocks[1].p_k == doctest::Approx(0.022542110013890053).epsilon(1e-14));
  CHECK(spec.blocks[1].atom == 16.0);
  for (const auto& b : spec.blocks) {
    if (b.k <= spec.k0) continue;
    CHECK(b.p_k < 0.5);
    CHECK(std::pow(1.0 - 2.0 * b.p_k, std::ldexp(1.0, 2 * b.k)) >= spec.c_const);
    CHECK(exact_moment(spec, b.first, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(exact_moment(spec, 2, 1.0) == 0.0);
}

TEST_CASE("martingale counterexample r = 1, p = 3, f_1") {
  const auto spec = build_counterexample_mds({1.0, 3.0, 1.0}, f1, 1 << 12);
  CHECK(spec.moment_order == doctest::Approx(4.0));
  CHECK(spec.k0 == 2);
  CHECK(spec.blocks[1].p_k == doctest::Approx(1.0 / (256.0 * kLn4)).epsilon(1e-14));
  CHECK(spec.blocks[1].p_k == doctest::Approx(0.0028177637517362567).epsilon(1e-13));
  for (const auto& b : spec.blocks) {
    if (b.k <= spec.k0) continue;
    CHECK(exact_moment(spec, b.last, 4.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(kind_of([] { (void)build_counterexample_mds({1.0, 1.5, 1.0}, f1, 64); }) == ErrorKind::Unsupported);
}

TEST_CASE("arbitrary counterexample r = 1/2, p = 1, f_1") {
  const auto spec = build_counterexample_arbitrary({0.5, 1.0, 1.0}, f1, 1 << 12);
  CHECK(spec.moment_order == doctest::Approx(1.0));
  CHECK(spec.blocks[0].p_k == doctest::Approx(0.090168440055560213).epsilon(1e-14));
  for (const auto& b : spec.blocks) {
    if (b.k <= spec.k0) continue;
    CHECK(exact_moment(spec, b.first, 1.0) == doctest::Approx(4.0).epsilon(1e-12));
  }
  // One coin per block: every nonzero entry of a block equals the block atom.
  RandomStream rng(5, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const auto path = sample_path(spec, spec.n_max, rng);
    for (const auto& b : spec.blocks) {
      const double first = path.x[b.first - 1];
      CHECK((first == 0.0 || first == b.atom));
      for (auto n = b.first; n <= b.last; ++n) REQUIRE(path.x[n - 1] == first);
    }
  }
  CHECK(kind_of([] { (void)build_counterexample_arbitrary({1.0, 1.0, 1.0}, f1, 64); }) == ErrorKind::Unsupported);
}

TEST_CASE("baselines") {
  const auto rad = rademacher(100);
  CHECK(rad.independent());
  CHECK(exact_moment(rad, 50, 2.0, FSpec::log_tower(1, 0.0)) == doctest::Approx(1.0));
  const auto skew = build_baseline(ProcessKind::IIDDiscrete, {-1.0, 3.0}, {0.75, 0.25}, 10, true);
  double mean = 0.0;
  for (const auto& a : skew.marginal(3)) mean += a.value * a.prob;
  CHECK(mean == 0.0);
  CHECK(kind_of([] { (void)build_baseline(ProcessKind::IIDDiscrete, {0.0, 1.0}, {0.5, 0.6}, 10); }) ==
        ErrorKind::Validation);
  CHECK(kind_of([] { (void)build_baseline(ProcessKind::NAViaIndependent, {0.0, 1.0}, {0.5, 0.5}, 10); }) ==
        ErrorKind::Validation);
}

TEST_CASE("sample paths") {
  const auto zero = zero_process(3);
  RandomStream rng(1, 1);
  const auto p0 = sample_path(zero, 3, rng);
  CHECK(p0.x == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(p0.m == std::vector<double>{0.0, 0.0, 0.0});

  const auto rad = rademacher(64);
  RandomStream a(9, 4), b(9, 4);
  const auto pa = sample_path(rad, 64, a);
  const auto pb = sample_path(rad, 64, b);
  CHECK(pa.x == pb.x);
  double s = 0.0, m = 0.0;
  for (std::size_t i = 0; i < pa.x.size(); ++i) {
    s += pa.x[i];
    m = std::max(m, std::abs(s));
    CHECK(pa.s[i] == s);
    CHECK(pa.m[i] == m);
  }
  CHECK(kind_of([&] {
          RandomStream r(0, 0);
          (void)sample_path(rad, 65, r);
        }) == ErrorKind::HorizonExceeded);
}

TEST_CASE("empirical nonzero frequency matches 2 p_k") {
  const auto spec = build_counterexample_independent({1.0, 1.0, 1.0}, f1, 63);
  const auto& blk = spec.blocks[2];  // k = 3, indices 16..63
  const PathSampler sampler(spec);
  std::uint64_t nonzero = 0, draws = 0;
  for (std::uint32_t rep = 0; rep < 20000; ++rep) {
    RandomStream rng(3, 11, rep);
    sampler.run(63, rng, [&](std::int64_t n, double x) {
      if (n < blk.first) return;
      ++draws;
      nonzero += x != 0.0;
    });
  }
  const double p = 2.0 * blk.p_k;
  const double sd = std::sqrt(p * (1 - p) / static_cast<double>(draws));
  CHECK(std::abs(static_cast<double>(nonzero) / static_cast<double>(draws) - p) <= 4 * sd);
}

TEST_CASE("k0 with a constant f") {
  const auto one = FSpec::dyadic(funclib::DyadicFunction::constant(1.0, 40));
  const auto spec = build_counterexample_independent({1.0, 1.0, 1.0}, one, 1 << 10);
  CHECK(spec.c_const == doctest::Approx(std::exp(-3.0)));
  CHECK(spec.k0 == 1);
  // f = 1/5: block 1 has p_1 = 5/4 and the horizon ends inside block 1.
  const auto fifth = FSpec::dyadic(funclib::DyadicFunction::from_values(std::vector<double>(40, 0.2), 0.2));
  CHECK(kind_of([&] { (void)build_counterexample_independent({1.0, 1.0, 1.0}, fifth, 3); }) == ErrorKind::Infeasible);
}
