#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rsa::stats {

struct AnovaRow {
  std::string term;
  double ss = 0.0;
  std::size_t df = 0;
  double ms = 0.0;
  std::optional<double> f;  // empty when the residual mean square is zero
  std::optional<double> p;
};

struct AnovaTable {
  std::vector<AnovaRow> terms;  // factor A, factor B, then A:B when estimable
  AnovaRow residual;
  double ss_model = 0.0;  // sum of squared fitted deviations from the grand mean
  double ss_total = 0.0;  // sum of squared deviations from the grand mean
  bool interaction = false;
  std::vector<std::string> warnings;

  const AnovaRow& term(const std::string& name) const;
};

// Two-way ANOVA with Type II sums of squares, computed from least-squares
// fits of effects-coded models:
//   SS(A)   = RSS(B)     - RSS(A+B)
//   SS(B)   = RSS(A)     - RSS(A+B)
//   SS(A:B) = RSS(A+B)   - RSS(A+B+A:B)
// The interaction enters only when every A x B cell is observed.
AnovaTable anova_two_way(std::span<const double> values,
                         std::span<const std::string> factor_a,
                         std::span<const std::string> factor_b,
                         const std::string& name_a = "A",
                         const std::string& name_b = "B");

}  // namespace rsa::stats
