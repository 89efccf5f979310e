#include "rsa/rankstats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "rsa/counter_rng.hpp"
#include "rsa/error.hpp"
#include "rsa/special_functions.hpp"

namespace rsa::stats {

std::string_view to_string(CorrelationMethod method) {
  switch (method) {
    case CorrelationMethod::spearman: return "spearman";
    case CorrelationMethod::kendall_a: return "kendall_a";
    case CorrelationMethod::pearson: return "pearson";
  }
  return "unknown";
}

CorrelationMethod parse_correlation_method(std::string_view text) {
  if (text == "spearman") return CorrelationMethod::spearman;
  if (text == "kendall_a" || text == "kendall") return CorrelationMethod::kendall_a;
  if (text == "pearson") return CorrelationMethod::pearson;
  throw ValidationError(fmt::format("unknown statistic '{}'", text));
}

namespace {

void require_paired(std::span<const double> x, std::span<const double> y, std::size_t min_n) {
  if (x.size() != y.size()) {
    throw ValidationError(fmt::format("length mismatch ({} vs {})", x.size(), y.size()));
  }
  if (x.size() < min_n) {
    throw ValidationError(fmt::format("need at least {} observations, got {}", min_n, x.size()));
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::ranges::all_of(x, finite) || !std::ranges::all_of(y, finite)) {
    throw ValidationError("non-finite input");
  }
}

bool is_constant(std::span<const double> v) {
  return std::ranges::all_of(v, [&](double e) { return e == v.front(); });
}

// Plain Pearson on validated, non-constant input.
double pearson_unchecked(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_p_value(double rho, std::size_t n) {
  if (std::fabs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  return student_t_two_sided(t, df);
}

// Counts pairs i < j with v[i] > v[j] while stably sorting v.
std::int64_t sort_counting_inversions(std::vector<double>& v, std::vector<double>& scratch) {
  std::int64_t inversions = 0;
  const std::size_t n = v.size();
  scratch.resize(n);
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += static_cast<std::int64_t>(mid - i);
          scratch[k++] = v[j++];
        } else {
          scratch[k++] = v[i++];
        }
      }
      while (i < mid) scratch[k++] = v[i++];
      while (j < hi) scratch[k++] = v[j++];
    }
    v.swap(scratch);
  }
  return inversions;
}

// Sum of t(t-1)/2 over runs of equal adjacent values in a sorted sequence.
template <typename Equal>
std::int64_t tied_pairs(std::size_t n, Equal equal) {
  std::int64_t pairs = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      pairs += static_cast<std::int64_t>(run * (run - 1) / 2);
      run = 1;
    }
  }
  return pairs;
}

}  // namespace

std::vector<double> rank_with_ties(std::span<const double> values) {
  if (values.empty()) throw ValidationError("cannot rank an empty sequence");
  if (!std::ranges::all_of(values, [](double v) { return std::isfinite(v); })) {
    throw ValidationError("non-finite input");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    const double rank = static_cast<double>(start + 1 + end) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 2);
  if (is_constant(x) || is_constant(y)) throw ValidationError("zero variance");
  return pearson_unchecked(x, y);
}

double spearman_coefficient(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 3);
  if (is_constant(x) || is_constant(y)) throw ValidationError("zero rank variance");
  return pearson_unchecked(rank_with_ties(x), rank_with_ties(y));
}

CorrelationReport spearman_rho(std::span<const double> x, std::span<const double> y,
                               std::size_t n_tests) {
  CorrelationReport report;
  report.coefficient = spearman_coefficient(x, y);
  report.n = x.size();
  report.p_raw = spearman_p_value(report.coefficient, report.n);
  report.n_tests = n_tests;
  report.p_adjusted = bonferroni(report.p_raw, n_tests);
  report.method = CorrelationMethod::spearman;
  return report;
}

CorrelationReport spearman_rho_permutation(std::span<const double> x, std::span<const double> y,
                                           std::uint64_t seed, std::size_t draws,
                                           std::size_t n_tests) {
  if (draws == 0) throw ValidationError("permutation count must be positive");
  CorrelationReport report = spearman_rho(x, y, n_tests);
  const auto rx = rank_with_ties(x);
  const auto ry = rank_with_ties(y);
  const double observed = std::fabs(report.coefficient);
  std::vector<double> shuffled(ry.size());
  std::size_t extreme = 0;
  for (std::size_t draw = 0; draw < draws; ++draw) {
    const CounterRng rng(seed, draw);
    shuffled.assign(ry.begin(), ry.end());
    for (std::size_t k = shuffled.size() - 1; k > 0; --k) {
      const auto j = static_cast<std::size_t>(rng.uniform(k) * static_cast<double>(k + 1));
      std::swap(shuffled[k], shuffled[std::min(j, k)]);
    }
    // Permutations that tie the observed value (up to round-off) count as extreme.
    if (std::fabs(pearson_unchecked(rx, shuffled)) >= observed - 1e-12) ++extreme;
  }
  report.p_raw = static_cast<double>(extreme + 1) / static_cast<double>(draws + 1);
  report.p_adjusted = bonferroni(report.p_raw, n_tests);
  return report;
}

double kendall_tau_a(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 2);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const std::int64_t tied_x = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]];
  });
  const std::int64_t tied_xy = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]] && y[order[i]] == y[order[j]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> scratch;
  const std::int64_t discordant = sort_counting_inversions(ys, scratch);
  const std::int64_t tied_y = tied_pairs(n, [&](std::size_t i, std::size_t j) { return ys[i] == ys[j]; });

  const auto total = static_cast<std::int64_t>(n * (n - 1) / 2);
  const std::int64_t concordant = total - tied_x - tied_y + tied_xy - discordant;
  return static_cast<double>(concordant - discordant) / static_cast<double>(total);
}

double bonferroni(double p_raw, std::size_t n_tests) {
  if (!(p_raw >= 0.0 && p_raw <= 1.0)) throw ValidationError("p-value outside [0, 1]");
  if (n_tests == 0) throw ValidationError("number of tests must be at least 1");
  return std::min(1.0, static_cast<double>(n_tests) * p_raw);
}

double correlation_coefficient(CorrelationMethod method, std::span<const double> x,
                               std::span<const double> y) {
  switch (method) {
    case CorrelationMethod::spearman: return spearman_coefficient(x, y);
    case CorrelationMethod::kendall_a: return kendall_tau_a(x, y);
    case CorrelationMethod::pearson: return pearson_r(x, y);
  }
  throw ValidationError("unknown correlation method");
}

}  // namespace rsa::stats
