#include <cmath>

#include "doctest.h"

#include "bklab/error.hpp"
#include "bklab/montecarlo.hpp"

using namespace bklab;

TEST_CASE("Wilson intervals") {
  const auto half = wilson_interval(50, 100);
  CHECK(half.low == doctest::Approx(0.4038315303659956).epsilon(1e-13));
  CHECK(half.high == doctest::Approx(0.5961684696340044).epsilon(1e-13));
  const auto rare = wilson_interval(7, 1000);
  CHECK(rare.low == doctest::Approx(0.003394868400990765).epsilon(1e-12));
  CHECK(rare.high == doctest::Approx(0.014378315465766586).epsilon(1e-12));
  CHECK(wilson_interval(0, 10).low == 0.0);
  CHECK(wilson_interval(10, 10).high == 1.0);
}

TEST_CASE("degenerate processes") {
  McOptions opt;
  opt.trials = 1000;
  opt.seed = 3;
  const auto z = estimate_tail(zero_process(8), 8, 0.0, Statistic::M, opt);
  CHECK(z.hits == 0);
  CHECK(z.p_hat == 0.0);
  CHECK(z.ci_low == 0.0);
  const auto one = estimate_tail(rademacher(1), 1, 0.5, Statistic::S, opt);
  CHECK(one.hits == 1000);
  CHECK(one.ci_high == 1.0);
  CHECK(to_string(one.provenance) == "montecarlo");
}

TEST_CASE("independent counterexample at n = 4") {
  const auto spec = build_counterexample_independent({1.0, 1.0, 1.0}, FSpec::log_tower(1, 0.0), 1 << 8);
  McOptions opt;
  opt.trials = 100000;
  opt.seed = 11;
  const auto est = estimate_tail(spec, 4, 4.0, Statistic::S, opt);
  const double p = 0.045084220027780106;
  const double se = std::sqrt(p * (1 - p) / 100000.0);
  CHECK(std::abs(est.p_hat - p) <= 4 * se);
  CHECK(est.ci_low <= est.p_hat);
  CHECK(est.p_hat <= est.ci_high);
}

TEST_CASE("thread count and reruns leave hits unchanged") {
  const auto rad = rademacher(256);
  McOptions opt;
  opt.trials = 5000;
  opt.seed = 99;
  const std::vector<double> ts{2.0, 8.0, 16.0, 30.0};
  const auto a = estimate_tail_multi(rad, 200, ts, Statistic::M, opt);
  opt.threads = 4;
  const auto b = estimate_tail_multi(rad, 200, ts, Statistic::M, opt);
  opt.threads = 7;
  const auto c = estimate_tail_multi(rad, 200, ts, Statistic::M, opt);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(a[i].hits == b[i].hits);
    CHECK(a[i].hits == c[i].hits);
    if (i > 0) CHECK(a[i].hits <= a[i - 1].hits);
  }
  const auto single = estimate_tail(rad, 200, 8.0, Statistic::M, opt);
  CHECK(single.hits == a[1].hits);
}

TEST_CASE("grid estimates") {
  const auto rad = rademacher(1024);
  McOptions opt;
  opt.trials = 2000;
  opt.seed = 5;
  const ExponentParams params{1.5, 1.5, 1.0};
  const std::vector<std::int64_t> grid{4, 16, 64, 256, 1024};
  const auto g1 = estimate_grid(rad, params, grid, Statistic::M, opt);
  const auto g2 = estimate_grid(rad, params, grid, Statistic::M, opt);
  REQUIRE(g1.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(g1[i].hits == g2[i].hits);
    CHECK(g1[i].t == doctest::Approx(threshold(params, static_cast<double>(grid[i]))));
  }
  CHECK_THROWS_AS(estimate_grid(rad, params, {16, 4}, Statistic::M, opt), LabError);
}

TEST_CASE("statistic names") {
  CHECK(parse_statistic("M") == Statistic::M);
  CHECK(to_string(Statistic::S) == "S");
  CHECK_THROWS_AS(parse_statistic("X"), LabError);
  CHECK(substream_id(5, Statistic::M) != substream_id(5, Statistic::S));
}
