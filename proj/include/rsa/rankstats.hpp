#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rsa::stats {

enum class CorrelationMethod { spearman, kendall_a, pearson };
std::string_view to_string(CorrelationMethod method);
CorrelationMethod parse_correlation_method(std::string_view text);

struct CorrelationReport {
  double coefficient = 0.0;
  std::size_t n = 0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;  // min(1, n_tests * p_raw)
  std::size_t n_tests = 1;
  CorrelationMethod method = CorrelationMethod::spearman;
};

// 1-based fractional ranks; ties share the mean of their rank span.
std::vector<double> rank_with_ties(std::span<const double> values);

double pearson_r(std::span<const double> x, std::span<const double> y);

// Coefficient only; used for row-wise and RDM-level comparisons.
double spearman_coefficient(std::span<const double> x, std::span<const double> y);

// p from the t approximation t = rho * sqrt((n-2) / (1-rho^2)), df = n-2,
// two-sided.
CorrelationReport spearman_rho(std::span<const double> x, std::span<const double> y,
                               std::size_t n_tests = 1);

inline constexpr std::size_t kDefaultPermutations = 10000;

// Same coefficient; p is the two-sided permutation estimate
// (1 + #{|rho_perm| >= |rho|}) / (1 + draws) over seeded shuffles of y.
CorrelationReport spearman_rho_permutation(std::span<const double> x, std::span<const double> y,
                                           std::uint64_t seed,
                                           std::size_t draws = kDefaultPermutations,
                                           std::size_t n_tests = 1);

// (C - D) / (n(n-1)/2). Pairs tied in x or y count toward neither C nor D
// but stay in the denominator. O(n log n).
double kendall_tau_a(std::span<const double> x, std::span<const double> y);

double bonferroni(double p_raw, std::size_t n_tests);

// Dispatches spearman / kendall_a / pearson to the coefficient functions.
double correlation_coefficient(CorrelationMethod method, std::span<const double> x,
                               std::span<const double> y);

}  // namespace rsa::stats
