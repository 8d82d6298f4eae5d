#pragma once

// Exact finite-n laws for the block-structured discrete processes: the law of
// S_n by blockwise convolution, P(M_n > t) by full path enumeration, and the
// Rademacher binomial tails used by the martingale counterexample.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bklab/generators.hpp"

namespace bklab {

struct SupportEntry {
  double value = 0.0;
  double prob = 0.0;
};

/// Law of a discrete random variable; values sorted and deduplicated.
struct SupportTable {
  std::vector<SupportEntry> entries;

  double total() const noexcept;
  std::size_t size() const noexcept { return entries.size(); }
};

/// Tail event |V| > t or |V| >= t.
enum class Comparison { Greater, GreaterEqual };

inline bool exceeds(double v, double t, Comparison cmp) noexcept {
  return cmp == Comparison::Greater ? v > t : v >= t;
}

constexpr std::size_t kDefaultSupportCap = 1'000'000;
constexpr std::int64_t kDefaultEnumerationLimit = 12;

/// Sort, merge values within 1e-9 * max|value| and drop zero masses.
SupportTable normalize_support(std::vector<SupportEntry> entries);

/// a * b for independent a, b.
SupportTable convolve(const SupportTable& a, const SupportTable& b, std::size_t cap = kDefaultSupportCap);

/// Exact law of S_n. Throws HorizonExceeded when the support outgrows `cap`.
SupportTable exact_sum_law(const ProcessSpec& spec, std::int64_t n, std::size_t cap = kDefaultSupportCap);

/// P(|V| > t) (or >=) under `law`.
double tail_probability(const SupportTable& law, double t, Comparison cmp = Comparison::Greater);

double exact_tail_S(const ProcessSpec& spec, std::int64_t n, double t, Comparison cmp = Comparison::Greater,
                    std::size_t cap = kDefaultSupportCap);

/// E|S_n|^p from the exact law.
double exact_abs_moment_S(const ProcessSpec& spec, std::int64_t n, double p, std::size_t cap = kDefaultSupportCap);

/// Calls visit(x, prob) once per positive-probability outcome of (X_1..X_n).
/// Outcomes that differ only in latent coins with the same X values are
/// visited separately.
void enumerate_paths(const ProcessSpec& spec, std::int64_t n,
                     const std::function<void(const std::vector<double>&, double)>& visit,
                     std::int64_t limit = kDefaultEnumerationLimit);

/// P(max_{i<=n} |S_i| > t) (or >=) by full enumeration, n <= limit.
double exact_tail_M(const ProcessSpec& spec, std::int64_t n, double t, Comparison cmp = Comparison::Greater,
                    std::int64_t limit = kDefaultEnumerationLimit);

/// max over positive-probability histories X_1..X_{n-1} of |E(X_n | history)|.
double conditional_mean_check(const ProcessSpec& spec, std::int64_t n,
                              std::int64_t limit = kDefaultEnumerationLimit);

/// P(R_m = s) for R_m a sum of m independent Rademacher signs.
double rademacher_pmf(std::int64_t m, std::int64_t s);

/// P(R_m >= threshold).
double binomial_ge(std::int64_t m, std::int64_t threshold);

/// min over m in [m_lo, m_hi] of P(R_m >= threshold), by the one-step recurrence
/// P(R_{m+1} >= t) = P(R_m >= t) + (P(R_m = t-1) - P(R_m = t)) / 2.
double binomial_ge_min(std::int64_t m_lo, std::int64_t m_hi, std::int64_t threshold);

/// B_n = sum_{i<=n} E X_i^2.
double exact_second_moment_sum(const ProcessSpec& spec, std::int64_t n);

/// P(max_{i<=n} |X_i| > a) for independent specs.
double exact_p_max(const ProcessSpec& spec, std::int64_t n, double a);

}  // namespace bklab
