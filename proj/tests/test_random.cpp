#include <cmath>
#include <set>

#include "doctest.h"

#include "bklab/random.hpp"

using namespace bklab;

TEST_CASE("philox known answers") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams replay and separate") {
  RandomStream a(42, 7, 3), b(42, 7, 3), c(42, 8, 3), d(42, 7, 4);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 300);
}

TEST_CASE("uniform range and mean") {
  RandomStream s(1, 2);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of the mean is sqrt(1/12/n) ~ 6.5e-4.
  CHECK(std::abs(sum / n - 0.5) < 4 * 6.5e-4);
}

TEST_CASE("hash combine is order sensitive") {
  CHECK(hash_combine(1, 2) != hash_combine(2, 1));
  CHECK(mix64(0) != mix64(1));
}
