#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rsa/anova.hpp"
#include "rsa/error.hpp"
#include "rsa/special_functions.hpp"

using namespace rsa;
using namespace rsa::stats;

namespace {

struct Design {
  std::vector<double> values;
  std::vector<std::string> a;
  std::vector<std::string> b;
};

Design flatten(const std::vector<std::vector<std::vector<double>>>& cells) {
  Design d;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < cells[i].size(); ++j) {
      for (double v : cells[i][j]) {
        d.values.push_back(v);
        d.a.push_back("a" + std::to_string(i));
        d.b.push_back("b" + std::to_string(j));
      }
    }
  }
  return d;
}

void expect_matches_cell_means(const std::vector<std::vector<std::vector<double>>>& cells) {
  const auto ref = oracle::balanced_anova(cells);
  const auto d = flatten(cells);
  const auto t = anova_two_way(d.values, d.a, d.b);
  ASSERT_TRUE(t.interaction);
  const double mse = ref.ss_error / ref.df_error;
  EXPECT_NEAR(t.term("A").ss, ref.ss_a, 1e-9);
  EXPECT_NEAR(t.term("B").ss, ref.ss_b, 1e-9);
  EXPECT_NEAR(t.term("A:B").ss, ref.ss_ab, 1e-9);
  EXPECT_NEAR(t.residual.ss, ref.ss_error, 1e-9);
  EXPECT_EQ(t.term("A").df, ref.df_a);
  EXPECT_EQ(t.term("B").df, ref.df_b);
  EXPECT_EQ(t.term("A:B").df, ref.df_ab);
  EXPECT_EQ(t.residual.df, ref.df_error);
  EXPECT_NEAR(*t.term("A").f, ref.ss_a / ref.df_a / mse, 1e-9);
  EXPECT_NEAR(*t.term("B").f, ref.ss_b / ref.df_b / mse, 1e-9);
  EXPECT_NEAR(*t.term("A:B").f, ref.ss_ab / ref.df_ab / mse, 1e-9);
  EXPECT_NEAR(*t.term("A").p, f_sf(*t.term("A").f, ref.df_a, ref.df_error), 1e-12);
}

}  // namespace

TEST(Anova, BalancedTwoByTwoHandValues) {
  expect_matches_cell_means({{{4, 6, 5}, {8, 9, 10}}, {{3, 2, 4}, {12, 11, 13}}});
}

TEST(Anova, BalancedRandomDesigns) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t na = 2 + trial % 3;
    const std::size_t nb = 2 + trial % 2;
    std::vector<std::vector<std::vector<double>>> cells(na, std::vector<std::vector<double>>(nb));
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        for (int r = 0; r < 4; ++r) cells[i][j].push_back(i * 0.5 - j * 0.3 + noise(rng));
      }
    }
    expect_matches_cell_means(cells);
  }
}

TEST(Anova, ConstantValuesHaveZeroSsAndNoF) {
  const auto d = flatten({{{3, 3}, {3, 3}}, {{3, 3}, {3, 3}}});
  const auto t = anova_two_way(d.values, d.a, d.b);
  for (const auto& row : t.terms) {
    EXPECT_EQ(row.ss, 0.0);
    EXPECT_FALSE(row.f);
    EXPECT_FALSE(row.p);
  }
  EXPECT_EQ(t.residual.ss, 0.0);
  EXPECT_FALSE(t.warnings.empty());
}

TEST(Anova, TotalSsIdentityOnUnbalancedData) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise;
  for (int trial = 0; trial < 50; ++trial) {
    Design d;
    const std::size_t n = 20 + rng() % 40;
    for (std::size_t k = 0; k < n; ++k) {
      const int a = static_cast<int>(rng() % 3);
      const int b = static_cast<int>(rng() % 2);
      d.values.push_back(a + 0.5 * b + noise(rng));
      d.a.push_back("g" + std::to_string(a));
      d.b.push_back("h" + std::to_string(b));
    }
    const auto t = anova_two_way(d.values, d.a, d.b);
    double mean = 0;
    for (double v : d.values) mean += v;
    mean /= n;
    double total = 0;
    for (double v : d.values) total += (v - mean) * (v - mean);
    EXPECT_NEAR(t.ss_total, total, 1e-9);
    EXPECT_NEAR(t.ss_model + t.residual.ss, total, 1e-9);
    for (const auto& row : t.terms) EXPECT_GE(row.ss, 0.0);
  }
}

TEST(Anova, TypeTwoIsSymmetricInFactorOrder) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise;
  Design d;
  for (int k = 0; k < 37; ++k) {
    const int a = static_cast<int>(rng() % 3);
    const int b = static_cast<int>(rng() % 2);
    d.values.push_back(a - b + noise(rng));
    d.a.push_back(std::to_string(a));
    d.b.push_back(std::to_string(b));
  }
  const auto ab = anova_two_way(d.values, d.a, d.b, "A", "B");
  const auto ba = anova_two_way(d.values, d.b, d.a, "B", "A");
  EXPECT_NEAR(ab.term("A").ss, ba.term("A").ss, 1e-10);
  EXPECT_NEAR(ab.term("B").ss, ba.term("B").ss, 1e-10);
}

TEST(Anova, EmptyCellDropsInteraction) {
  Design d{{1, 2, 3, 4, 5, 6, 2.5}, {"x", "x", "y", "y", "z", "z", "x"}, {"p", "q", "p", "q", "p", "p", "q"}};
  const auto t = anova_two_way(d.values, d.a, d.b);
  EXPECT_FALSE(t.interaction);
  EXPECT_EQ(t.terms.size(), 2u);
  ASSERT_FALSE(t.warnings.empty());
  EXPECT_THROW(t.term("A:B"), ValidationError);
}

TEST(Anova, Errors) {
  EXPECT_THROW(anova_two_way(std::vector<double>{1, 2, 3}, std::vector<std::string>{"a", "a", "a"},
                             std::vector<std::string>{"x", "y", "x"}),
               ValidationError);
  // 2x2 with one observation per cell leaves no residual df once the
  // interaction is in.
  EXPECT_THROW(anova_two_way(std::vector<double>{1, 2, 3, 4}, std::vector<std::string>{"a", "a", "b", "b"},
                             std::vector<std::string>{"x", "y", "x", "y"}),
               ValidationError);
  EXPECT_THROW(anova_two_way(std::vector<double>{1, 2}, std::vector<std::string>{"a"},
                             std::vector<std::string>{"x", "y"}),
               ValidationError);
}
