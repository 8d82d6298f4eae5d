#include "bklab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "bklab/error.hpp"

namespace bklab {

namespace {

double max_abs(const std::vector<SupportEntry>& e) {
  double m = 0.0;
  for (const auto& x : e) m = std::max(m, std::abs(x.value));
  return m;
}

// Merges sorted `add` into sorted `acc`, combining values within `tol`.
void merge_into(std::vector<SupportEntry>& acc, const std::vector<SupportEntry>& add, double tol,
                std::vector<SupportEntry>& scratch) {
  scratch.clear();
  scratch.reserve(acc.size() + add.size());
  auto push = [&](const SupportEntry& e) {
    if (!scratch.empty() && e.value - scratch.back().value <= tol) {
      scratch.back().prob += e.prob;
    } else {
      scratch.push_back(e);
    }
  };
  std::size_t i = 0, j = 0;
  while (i < acc.size() || j < add.size()) {
    if (j == add.size() || (i < acc.size() && acc[i].value <= add[j].value)) {
      push(acc[i++]);
    } else {
      push(add[j++]);
    }
  }
  acc.swap(scratch);
}

SupportTable power(const SupportTable& law, std::int64_t m, std::size_t cap) {
  SupportTable result{{{0.0, 1.0}}};
  if (law.size() == 1) {
    result.entries[0] = {static_cast<double>(m) * law.entries[0].value, law.entries[0].prob};
    return result;
  }
  SupportTable base = law;
  while (m > 0) {
    if (m & 1) result = convolve(result, base, cap);
    m >>= 1;
    if (m > 0) base = convolve(base, base, cap);
  }
  return result;
}

SupportTable table_of(const std::vector<Atom>& atoms) {
  std::vector<SupportEntry> e;
  for (const auto& a : atoms) e.push_back({a.value, a.prob});
  return normalize_support(std::move(e));
}

SupportTable block_sum_law(const BlockLaw& b, std::int64_t m, std::size_t cap) {
  const double dm = static_cast<double>(m);
  switch (b.coupling) {
    case Coupling::Independent:
      return power(table_of(b.atoms), m, cap);
    case Coupling::Shared: {
      std::vector<SupportEntry> e;
      for (const auto& a : b.atoms) e.push_back({dm * a.value, a.prob});
      return normalize_support(std::move(e));
    }
    case Coupling::SignTimesShared: {
      const SupportTable signs = power(table_of(b.sign_atoms), m, cap);
      std::vector<SupportEntry> e;
      for (const auto& z : b.atoms) {
        if (z.value == 0.0) {
          e.push_back({0.0, z.prob});
          continue;
        }
        for (const auto& s : signs.entries) e.push_back({z.value * s.value, z.prob * s.prob});
      }
      return normalize_support(std::move(e));
    }
  }
  return {};
}

void check_enumerable(const ProcessSpec& spec, std::int64_t n, std::int64_t limit) {
  require(n >= 1, "enumeration needs n >= 1");
  if (n > limit) {
    fail(ErrorKind::HorizonExceeded,
         "n=" + std::to_string(n) + " exceeds the full-enumeration limit " + std::to_string(limit));
  }
  if (n > spec.n_max) fail(ErrorKind::HorizonExceeded, "n=" + std::to_string(n) + " exceeds process horizon");
}

double log_choose(std::int64_t m, std::int64_t h) {
  return std::lgamma(static_cast<double>(m) + 1.0) - std::lgamma(static_cast<double>(h) + 1.0) -
         std::lgamma(static_cast<double>(m - h) + 1.0);
}

std::int64_t ceil_half(std::int64_t v) { return v >= 0 ? (v + 1) / 2 : -((-v) / 2); }

}  // namespace

double SupportTable::total() const noexcept {
  double s = 0.0;
  for (const auto& e : entries) s += e.prob;
  return s;
}

SupportTable normalize_support(std::vector<SupportEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const SupportEntry& a, const SupportEntry& b) { return a.value < b.value; });
  const double tol = 1e-9 * max_abs(entries);
  SupportTable out;
  for (const auto& e : entries) {
    if (!(e.prob > 0.0)) continue;
    if (!out.entries.empty() && e.value - out.entries.back().value <= tol) {
      out.entries.back().prob += e.prob;
    } else {
      out.entries.push_back(e);
    }
  }
  return out;
}

SupportTable convolve(const SupportTable& a, const SupportTable& b, std::size_t cap) {
  const double tol = 1e-9 * (max_abs(a.entries) + max_abs(b.entries));
  std::vector<SupportEntry> acc, shifted, scratch;
  for (const auto& eb : b.entries) {
    shifted.clear();
    for (const auto& ea : a.entries) {
      const double p = ea.prob * eb.prob;
      if (p > 0.0) shifted.push_back({ea.value + eb.value, p});
    }
    merge_into(acc, shifted, tol, scratch);
    if (acc.size() > cap) {
      fail(ErrorKind::HorizonExceeded, "exact law support exceeds cap " + std::to_string(cap));
    }
  }
  return SupportTable{std::move(acc)};
}

SupportTable exact_sum_law(const ProcessSpec& spec, std::int64_t n, std::size_t cap) {
  require(n >= 0, "exact_sum_law: n must be >= 0");
  if (n > spec.n_max) fail(ErrorKind::HorizonExceeded, "exact_sum_law: n exceeds process horizon");
  SupportTable law{{{0.0, 1.0}}};
  for (const auto& b : spec.blocks) {
    if (b.first > n) break;
    const std::int64_t m = std::min(b.last, n) - b.first + 1;
    if (b.is_zero()) continue;
    law = convolve(law, block_sum_law(b, m, cap), cap);
  }
  return law;
}

double tail_probability(const SupportTable& law, double t, Comparison cmp) {
  double s = 0.0;
  for (const auto& e : law.entries) {
    if (exceeds(std::abs(e.value), t, cmp)) s += e.prob;
  }
  return s;
}

double exact_tail_S(const ProcessSpec& spec, std::int64_t n, double t, Comparison cmp, std::size_t cap) {
  return tail_probability(exact_sum_law(spec, n, cap), t, cmp);
}

double exact_abs_moment_S(const ProcessSpec& spec, std::int64_t n, double p, std::size_t cap) {
  require(p > 0.0, "exact_abs_moment_S: p must be positive");
  double s = 0.0;
  for (const auto& e : exact_sum_law(spec, n, cap).entries) s += std::pow(std::abs(e.value), p) * e.prob;
  return s;
}

void enumerate_paths(const ProcessSpec& spec, std::int64_t n,
                     const std::function<void(const std::vector<double>&, double)>& visit, std::int64_t limit) {
  check_enumerable(spec, n, limit);
  std::vector<double> x(static_cast<std::size_t>(n));
  std::function<void(std::int64_t, double, double)> rec = [&](std::int64_t i, double prob, double shared) {
    if (i > n) {
      visit(x, prob);
      return;
    }
    const BlockLaw& b = spec.block_for(i);
    double& slot = x[static_cast<std::size_t>(i - 1)];
    const bool fresh = i == b.first;
    switch (b.coupling) {
      case Coupling::Independent:
        for (const auto& a : b.atoms) {
          if (a.prob <= 0.0) continue;
          slot = a.value;
          rec(i + 1, prob * a.prob, shared);
        }
        break;
      case Coupling::Shared:
        if (!fresh) {
          slot = shared;
          rec(i + 1, prob, shared);
          break;
        }
        for (const auto& a : b.atoms) {
          if (a.prob <= 0.0) continue;
          slot = a.value;
          rec(i + 1, prob * a.prob, a.value);
        }
        break;
      case Coupling::SignTimesShared: {
        auto with_z = [&](double z, double pz) {
          if (z == 0.0) {
            slot = 0.0;
            rec(i + 1, pz, z);
            return;
          }
          for (const auto& s : b.sign_atoms) {
            if (s.prob <= 0.0) continue;
            slot = z * s.value;
            rec(i + 1, pz * s.prob, z);
          }
        };
        if (!fresh) {
          with_z(shared, prob);
          break;
        }
        for (const auto& a : b.atoms) {
          if (a.prob > 0.0) with_z(a.value, prob * a.prob);
        }
        break;
      }
    }
  };
  rec(1, 1.0, 0.0);
}

double exact_tail_M(const ProcessSpec& spec, std::int64_t n, double t, Comparison cmp, std::int64_t limit) {
  double total = 0.0;
  enumerate_paths(
      spec, n,
      [&](const std::vector<double>& x, double prob) {
        double s = 0.0, m = 0.0;
        for (double v : x) {
          s += v;
          m = std::max(m, std::abs(s));
        }
        if (exceeds(m, t, cmp)) total += prob;
      },
      limit);
  return total;
}

double conditional_mean_check(const ProcessSpec& spec, std::int64_t n, std::int64_t limit) {
  std::map<std::vector<double>, std::pair<double, double>> by_history;
  enumerate_paths(
      spec, n,
      [&](const std::vector<double>& x, double prob) {
        std::vector<double> history(x.begin(), x.end() - 1);
        auto& [mass, first_moment] = by_history[history];
        mass += prob;
        first_moment += prob * x.back();
      },
      limit);
  double worst = 0.0;
  for (const auto& [history, acc] : by_history) {
    if (acc.first > 0.0) worst = std::max(worst, std::abs(acc.second / acc.first));
  }
  return worst;
}

double rademacher_pmf(std::int64_t m, std::int64_t s) {
  require(m >= 0, "rademacher_pmf: m must be >= 0");
  if (s > m || s < -m || ((m + s) & 1) != 0) return 0.0;
  const std::int64_t h = (m + s) / 2;
  return std::exp(log_choose(m, h) - static_cast<double>(m) * std::numbers::ln2);
}

double binomial_ge(std::int64_t m, std::int64_t threshold) {
  require(m >= 0, "binomial_ge: m must be >= 0");
  // R_m = 2H - m with H ~ Bin(m, 1/2); R_m >= t iff H >= ceil((m + t)/2).
  const std::int64_t h0 = ceil_half(m + threshold);
  if (h0 <= 0) return 1.0;
  if (h0 > m) return 0.0;
  const double log_norm = static_cast<double>(m) * std::numbers::ln2;
  double s = 0.0;
  if (2 * h0 > m) {
    for (std::int64_t h = m; h >= h0; --h) s += std::exp(log_choose(m, h) - log_norm);
    return std::min(s, 1.0);
  }
  for (std::int64_t h = 0; h < h0; ++h) s += std::exp(log_choose(m, h) - log_norm);
  return std::max(0.0, 1.0 - s);
}

double binomial_ge_min(std::int64_t m_lo, std::int64_t m_hi, std::int64_t threshold) {
  require(m_lo >= 0 && m_lo <= m_hi, "binomial_ge_min: need 0 <= m_lo <= m_hi");
  if (m_hi - m_lo > 100'000'000) fail(ErrorKind::HorizonExceeded, "binomial_ge_min: range too long");
  double p = binomial_ge(m_lo, threshold);
  double lowest = p;
  for (std::int64_t m = m_lo; m < m_hi; ++m) {
    p += 0.5 * (rademacher_pmf(m, threshold - 1) - rademacher_pmf(m, threshold));
    lowest = std::min(lowest, p);
  }
  return std::max(lowest, 0.0);
}

double exact_second_moment_sum(const ProcessSpec& spec, std::int64_t n) {
  require(n >= 0, "exact_second_moment_sum: n must be >= 0");
  if (n > spec.n_max) fail(ErrorKind::HorizonExceeded, "exact_second_moment_sum: n exceeds horizon");
  double total = 0.0;
  for (const auto& b : spec.blocks) {
    if (b.first > n) break;
    const std::int64_t m = std::min(b.last, n) - b.first + 1;
    double second = 0.0;
    for (const auto& a : spec.marginal(b.first)) second += a.value * a.value * a.prob;
    total += static_cast<double>(m) * second;
  }
  return total;
}

double exact_p_max(const ProcessSpec& spec, std::int64_t n, double a) {
  require(n >= 0, "exact_p_max: n must be >= 0");
  if (n > spec.n_max) fail(ErrorKind::HorizonExceeded, "exact_p_max: n exceeds horizon");
  if (!spec.independent()) fail(ErrorKind::Unsupported, "exact_p_max needs an independent process");
  double log_keep = 0.0;
  for (const auto& b : spec.blocks) {
    if (b.first > n) break;
    const std::int64_t m = std::min(b.last, n) - b.first + 1;
    double over = 0.0;
    for (const auto& at : spec.marginal(b.first)) {
      if (std::abs(at.value) > a) over += at.prob;
    }
    if (over >= 1.0) return 1.0;
    log_keep += static_cast<double>(m) * std::log1p(-over);
  }
  return -std::expm1(log_keep);
}

}  // namespace bklab
