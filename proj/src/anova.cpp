#include "rsa/anova.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "rsa/error.hpp"
#include "rsa/special_functions.hpp"

namespace rsa::stats {

const AnovaRow& AnovaTable::term(const std::string& name) const {
  for (const auto& row : terms) {
    if (row.term == name) return row;
  }
  throw ValidationError(fmt::format("no ANOVA term '{}'", name));
}

namespace {

struct Factor {
  std::vector<std::size_t> level;  // per observation
  std::size_t levels = 0;
};

Factor encode(std::span<const std::string> labels, const std::string& name) {
  std::map<std::string, std::size_t> index;
  for (const auto& label : labels) index.emplace(label, 0);
  if (index.size() < 2) {
    throw ValidationError(fmt::format("degenerate factor '{}': needs at least 2 levels", name));
  }
  std::size_t next = 0;
  for (auto& [label, i] : index) i = next++;
  Factor f;
  f.levels = index.size();
  f.level.reserve(labels.size());
  for (const auto& label : labels) f.level.push_back(index.at(label));
  return f;
}

// Effects (sum-to-zero) coding: column k is +1 for level k, -1 for the last
// level, 0 otherwise.
double effect(const Factor& f, std::size_t obs, std::size_t k) {
  const std::size_t level = f.level[obs];
  if (level == k) return 1.0;
  if (level == f.levels - 1) return -1.0;
  return 0.0;
}

struct Fit {
  double rss = 0.0;
  std::size_t rank = 0;
  Eigen::VectorXd fitted;
};

Fit least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  Fit fit;
  fit.rank = static_cast<std::size_t>(qr.rank());
  fit.fitted = x * qr.solve(y);
  fit.rss = (y - fit.fitted).squaredNorm();
  return fit;
}

}  // namespace

AnovaTable anova_two_way(std::span<const double> values, std::span<const std::string> factor_a,
                         std::span<const std::string> factor_b, const std::string& name_a,
                         const std::string& name_b) {
  const std::size_t n = values.size();
  if (factor_a.size() != n || factor_b.size() != n) {
    throw ValidationError("ANOVA inputs differ in length");
  }
  if (!std::ranges::all_of(values, [](double v) { return std::isfinite(v); })) {
    throw ValidationError("non-finite ANOVA value");
  }
  const Factor a = encode(factor_a, name_a);
  const Factor b = encode(factor_b, name_b);

  AnovaTable table;
  std::vector<std::size_t> cell_counts(a.levels * b.levels, 0);
  for (std::size_t i = 0; i < n; ++i) ++cell_counts[a.level[i] * b.levels + b.level[i]];
  table.interaction = std::ranges::none_of(cell_counts, [](std::size_t c) { return c == 0; });
  if (!table.interaction) {
    table.warnings.push_back(fmt::format("{}:{} interaction dropped: empty cells", name_a, name_b));
  }

  const auto rows = static_cast<Eigen::Index>(n);
  const std::size_t ca = a.levels - 1;
  const std::size_t cb = b.levels - 1;
  const std::size_t cab = table.interaction ? ca * cb : 0;

  Eigen::MatrixXd full(rows, static_cast<Eigen::Index>(1 + ca + cb + cab));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    Eigen::Index c = 0;
    full(r, c++) = 1.0;
    for (std::size_t k = 0; k < ca; ++k) full(r, c++) = effect(a, i, k);
    for (std::size_t k = 0; k < cb; ++k) full(r, c++) = effect(b, i, k);
    if (!table.interaction) continue;
    for (std::size_t ka = 0; ka < ca; ++ka) {
      for (std::size_t kb = 0; kb < cb; ++kb) full(r, c++) = effect(a, i, ka) * effect(b, i, kb);
    }
  }
  const auto ia = static_cast<Eigen::Index>(ca);
  const auto ib = static_cast<Eigen::Index>(cb);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), rows);

  const Eigen::MatrixXd main_effects = full.leftCols(1 + ia + ib);
  Eigen::MatrixXd only_a = full.leftCols(1 + ia);
  Eigen::MatrixXd only_b(rows, 1 + ib);
  only_b << full.col(0), full.middleCols(1 + ia, ib);

  const Fit fit_full = least_squares(full, y);
  const Fit fit_main = table.interaction ? least_squares(main_effects, y) : fit_full;
  const Fit fit_a = least_squares(only_a, y);
  const Fit fit_b = least_squares(only_b, y);

  if (fit_full.rank >= n) {
    throw ValidationError(fmt::format("residual degrees of freedom must be positive (n={}, model df={})",
                                      n, fit_full.rank));
  }

  const double mean = y.mean();
  table.ss_total = (y.array() - mean).square().sum();
  table.ss_model = (fit_full.fitted.array() - mean).square().sum();

  // Differences of residual sums at round-off level are reported as zero.
  const double scale = y.squaredNorm();
  auto clean = [&](double ss) { return std::fabs(ss) <= 1e-15 * scale ? 0.0 : std::max(ss, 0.0); };

  table.residual.term = "residual";
  table.residual.ss = clean(fit_full.rss);
  table.residual.df = n - fit_full.rank;
  table.residual.ms = table.residual.ss / static_cast<double>(table.residual.df);
  const bool residual_zero = table.residual.ss <= 1e-20 * scale;
  if (residual_zero) table.warnings.push_back("residual variance is zero; F undefined");

  auto add_term = [&](const std::string& name, double ss, std::size_t df) {
    AnovaRow row;
    row.term = name;
    row.ss = clean(ss);
    row.df = df;
    row.ms = df > 0 ? row.ss / static_cast<double>(df) : 0.0;
    if (df == 0) {
      table.warnings.push_back(fmt::format("term '{}' is not estimable", name));
    } else if (!residual_zero) {
      row.f = row.ms / table.residual.ms;
      row.p = f_sf(*row.f, static_cast<double>(df), static_cast<double>(table.residual.df));
    }
    table.terms.push_back(std::move(row));
  };

  add_term(name_a, fit_b.rss - fit_main.rss, fit_main.rank - fit_b.rank);
  add_term(name_b, fit_a.rss - fit_main.rss, fit_main.rank - fit_a.rank);
  if (table.interaction) {
    add_term(name_a + ":" + name_b, fit_main.rss - fit_full.rss, fit_full.rank - fit_main.rank);
  }
  return table;
}

}  // namespace rsa::stats
