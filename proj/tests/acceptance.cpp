// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli_harness.hpp"
#include "oracles.hpp"
#include "rsa/anova.hpp"
#include "rsa/lingfeat.hpp"
#include "rsa/orders.hpp"
#include "rsa/rankstats.hpp"
#include "rsa/rdm.hpp"
#include "rsa/special_functions.hpp"
#include "rsa/synth.hpp"
#include "rsa/tree.hpp"

using namespace rsa;
using Vec = std::vector<double>;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---- 1 ----------------------------------------------------------------------

Outcome statistics_oracles() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240101);
  double worst_rho = 0, worst_r = 0;
  auto check = [&](const Vec& x, const Vec& y) {
    if (stats::kendall_tau_a(x, y) != oracle::kendall_tau_a(x, y)) o.fail("kendall mismatch");
    const auto rx = oracle::rankify(x);
    const auto ry = oracle::rankify(y);
    const bool ranks_vary = std::ranges::adjacent_find(rx, std::not_equal_to<>()) != rx.end() &&
                            std::ranges::adjacent_find(ry, std::not_equal_to<>()) != ry.end();
    if (ranks_vary && x.size() >= 3) {
      worst_rho = std::max(worst_rho, std::fabs(stats::spearman_coefficient(x, y) - oracle::spearman(x, y)));
      worst_r = std::max(worst_r, std::fabs(stats::pearson_r(x, y) - oracle::pearson(x, y)));
    }
  };
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 3 + rng() % 200;
    const int levels = 2 + static_cast<int>(rng() % 20);
    check(oracle::tied_vector(rng, n, levels), oracle::tied_vector(rng, n, levels));
  }
  for (int n = 2; n <= 6; ++n) {
    Vec x(n);
    std::iota(x.begin(), x.end(), 1.0);
    Vec y(x);
    do {
      check(x, y);
    } while (std::next_permutation(y.begin(), y.end()));
  }
  const double elapsed = seconds_since(start);
  if (worst_rho > 1e-12) o.fail(fmt::format("spearman error {:.3g}", worst_rho));
  if (worst_r > 1e-12) o.fail(fmt::format("pearson error {:.3g}", worst_r));
  if (elapsed >= 10) o.fail(fmt::format("took {:.2f} s", elapsed));
  if (o.pass) o.detail = fmt::format("max |drho| {:.2g}, max |dr| {:.2g}, {:.2f} s", worst_rho, worst_r, elapsed);
  return o;
}

// ---- 2 ----------------------------------------------------------------------

Outcome tau_a_convention() {
  Outcome o;
  const double tau = stats::kendall_tau_a(Vec{1, 1, 2}, Vec{1, 2, 3});
  if (tau != 2.0 / 3.0) o.fail(fmt::format("got {:.17g}", tau));
  if (tau != oracle::kendall_tau_a(Vec{1, 1, 2}, Vec{1, 2, 3})) o.fail("oracle disagrees");
  o.detail = o.pass ? "tau = 2/3" : o.detail;
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome special_functions() {
  Outcome o;
  double worst = 0, worst_sym = 0;
  for (double df : {1.0, 2.0, 8.0, 30.0, 2366.0}) {
    for (int k = -40; k <= 40; ++k) {
      const double t = k * 0.25;
      worst = std::max(worst, std::fabs(stats::student_t_sf(t, df) - oracle::student_t_sf(t, df)));
      worst_sym = std::max(worst_sym, std::fabs(stats::student_t_sf(t, df) + stats::student_t_sf(-t, df) - 1.0));
    }
  }
  if (worst > 1e-9) o.fail(fmt::format("quadrature error {:.3g}", worst));
  if (worst_sym > 1e-12) o.fail(fmt::format("symmetry error {:.3g}", worst_sym));
  if (o.pass) o.detail = fmt::format("max error {:.2g}, symmetry {:.2g}", worst, worst_sym);
  return o;
}

// ---- 4 ----------------------------------------------------------------------

ActivityMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t h) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
  std::vector<double> data = oracle::normal_vector(rng, n * h);
  // A few constant rows exercise the correlation fallback.
  if (rng() % 4 == 0) std::fill_n(data.begin(), h, 0.5);
  return ActivityMatrix(ConditionSet(ids), LayerId{"m", 1}, h, std::move(data));
}

Outcome rdm_invariants() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst_identity = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 40;
    const std::size_t h = 2 + rng() % 30;
    const auto m = random_matrix(rng, n, h);
    const auto identity = CovarianceEstimate::identity(h);
    const auto corr = build_rdm(m, Measure::correlation);
    const auto eucl = build_rdm(m, Measure::euclidean);
    const auto maha = build_rdm(m, Measure::mahalanobis, identity);
    for (const Rdm* r : {&corr, &eucl, &maha}) {
      for (std::size_t i = 0; i < n; ++i) {
        if ((*r)(i, i) != 0.0) o.fail("non-zero diagonal");
        for (std::size_t j = 0; j < n; ++j) {
          if ((*r)(i, j) != (*r)(j, i)) o.fail("asymmetric");
          if (!std::isfinite((*r)(i, j)) || (*r)(i, j) < 0) o.fail("negative or non-finite entry");
        }
      }
    }
    for (double v : corr.data()) {
      if (v < 0 || v > 2) o.fail("correlation entry outside [0,2]");
    }
    for (std::size_t k = 0; k < n * n; ++k) {
      worst_identity = std::max(worst_identity, std::fabs(maha.data()[k] - eucl.data()[k]));
    }
  }
  if (worst_identity > 1e-10) o.fail(fmt::format("identity mahalanobis off by {:.3g}", worst_identity));
  if (o.pass) o.detail = fmt::format("100 matrices, identity-vs-euclidean {:.2g}", worst_identity);
  return o;
}

// ---- 5 ----------------------------------------------------------------------

Rdm random_rdm(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
  std::uniform_real_distribution<double> d(0.01, 2.0);
  std::vector<double> data(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) data[i * n + j] = data[j * n + i] = d(rng);
  }
  return Rdm(ConditionSet(ids), Measure::euclidean, "m:1", data);
}

Outcome second_order() {
  Outcome o;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = random_rdm(rng, 12);
    std::vector<double> doubled(r.data().begin(), r.data().end());
    for (auto& v : doubled) v *= 2;
    const Rdm r2(r.conditions(), Measure::euclidean, "m:2", doubled);
    const auto self = per_condition_agreement(r, r);
    const auto scaled = per_condition_agreement(r, r2);
    for (std::size_t s = 0; s < 12; ++s) {
      if (self.agreement[s] != 1.0) o.fail("agreement(R,R) != 1");
      if (scaled.agreement[s] != 1.0) o.fail("agreement(R,2R) != 1");
    }
    const auto other = random_rdm(rng, 12);
    const auto v = per_condition_agreement(r, other);
    for (std::size_t s = 0; s < 12; ++s) {
      Vec a, b;
      for (std::size_t t = 0; t < 12; ++t) {
        if (t == s) continue;
        a.push_back(r(s, t));
        b.push_back(other(s, t));
      }
      if (v.agreement[s] != oracle::kendall_tau_a(a, b)) o.fail("per-row oracle mismatch");
    }
  }
  if (o.pass) o.detail = "50 random RDMs at N = 12";
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome sign_flip() {
  Outcome o;
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 4 + rng() % 60;
    const auto v = per_condition_agreement(random_rdm(rng, n), random_rdm(rng, n));
    const FeatureVector f{v.conditions, oracle::tied_vector(rng, n, 1 + n / 2), "f"};
    const bool varies = std::ranges::adjacent_find(f.values, std::not_equal_to<>()) != f.values.end() &&
                        std::ranges::adjacent_find(v.agreement, std::not_equal_to<>()) != v.agreement.end();
    if (!varies) continue;
    const auto report = third_order(v, f, 1);
    const auto disagreement = v.disagreement();
    const double direct = stats::spearman_coefficient(disagreement, f.values);
    if (report.disagreement_coefficient != -report.agreement.coefficient) o.fail("report not negated");
    if (direct != -report.agreement.coefficient) {
      o.fail(fmt::format("direct disagreement rho {:.17g} vs {:.17g}", direct, report.agreement.coefficient));
    }
  }
  if (o.pass) o.detail = "1000 random pairs";
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome yngve() {
  Outcome o;
  const auto worked = parse_bracketed("(S (NP (DT the) (NN cat)) (VP (VBD sat)))");
  if (yngve_depths(worked) != Vec{2, 1, 0}) o.fail("worked tree depths");
  if (yngve_sentence_score(worked) != 1.0) o.fail("worked tree score");
  for (int n = 1; n <= 20; ++n) {
    std::string text = "(S";
    for (int i = 0; i < n; ++i) text += " w";
    if (yngve_sentence_score(parse_bracketed(text + ")")) != (n - 1) / 2.0) o.fail(fmt::format("flat n={}", n));
  }
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const auto tree = parse_bracketed(oracle::random_tree(rng));
    double total = 0;
    for (double d : yngve_depths(tree)) total += d;
    if (total != static_cast<double>(oracle::yngve_mass_by_node(tree))) o.fail("mass mismatch");
  }
  if (o.pass) o.detail = "worked tree, flat 1..20, 500 random trees";
  return o;
}

// ---- 8 ----------------------------------------------------------------------

Outcome layer_groups() {
  Outcome o;
  std::map<LayerGroup, int> counts;
  for (int i = 1; i <= 24; ++i) {
    for (int j = i + 1; j <= 24; ++j) {
      ++counts[assign_layer_group(LayerPair::make(LayerId{"m", i}, LayerId{"m", j}), 24)];
    }
  }
  o.detail = fmt::format("low={} middle={} high={} out={} excluded={}", counts[LayerGroup::low],
                         counts[LayerGroup::middle], counts[LayerGroup::high], counts[LayerGroup::out],
                         counts[LayerGroup::excluded]);
  if (counts[LayerGroup::low] != 28 || counts[LayerGroup::middle] != 28 || counts[LayerGroup::high] != 28 ||
      counts[LayerGroup::out] != 136 || counts[LayerGroup::excluded] != 56) {
    o.pass = false;
  }
  return o;
}

// ---- 9 ----------------------------------------------------------------------

Outcome synthetic_reproduction() {
  Outcome o;
  const auto start = Clock::now();
  int planted_hits = 0, band_hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    synth::SynthSpec spec;
    spec.seed = seed;
    spec.conditions = 256;
    spec.dims = 32;
    spec.layers = 4;
    const auto data = synth::generate(spec);
    const auto first = build_rdm(data.layers.front(), Measure::correlation);
    const auto last = build_rdm(data.layers.back(), Measure::correlation);
    const auto v = per_condition_agreement(first, last);
    if (stats::spearman_coefficient(v.agreement, data.difficulty.values) < -0.5) ++planted_hits;

    spec.noise_gain = 0.0;
    const auto quiet = synth::generate(spec);
    const auto q = per_condition_agreement(build_rdm(quiet.layers.front(), Measure::correlation),
                                           build_rdm(quiet.layers.back(), Measure::correlation));
    if (!std::ranges::all_of(q.agreement, [](double a) { return a == 1.0; })) o.fail("zero-noise agreement != 1");

    synth::BandSpec band;
    band.seed = seed;
    const auto values = synth::band_values(band);
    std::vector<LayerPair> pairs;
    Vec vals;
    for (const auto& pv : values) {
      pairs.push_back(pv.pair);
      vals.push_back(pv.value);
    }
    const auto& group = group_anova(vals, pairs, 24).table.term("group");
    if (group.p && *group.p < 0.01) ++band_hits;
  }
  const double elapsed = seconds_since(start);
  if (planted_hits < 18) o.fail(fmt::format("planted rho < -0.5 in {}/20", planted_hits));
  if (band_hits < 18) o.fail(fmt::format("band p < 0.01 in {}/20", band_hits));
  if (elapsed >= 60) o.fail(fmt::format("took {:.1f} s", elapsed));
  if (o.pass) o.detail = fmt::format("planted {}/20, bands {}/20, {:.1f} s", planted_hits, band_hits, elapsed);
  return o;
}

// ---- 10 ---------------------------------------------------------------------

Outcome anova() {
  Outcome o;
  const std::vector<std::vector<Vec>> cells{{{4, 6, 5}, {8, 9, 10}}, {{3, 2, 4}, {12, 11, 13}}};
  const auto ref = oracle::balanced_anova(cells);
  Vec values;
  std::vector<std::string> a, b;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (double v : cells[i][j]) {
        values.push_back(v);
        a.push_back("a" + std::to_string(i));
        b.push_back("b" + std::to_string(j));
      }
    }
  }
  const auto t = stats::anova_two_way(values, a, b);
  const double mse = ref.ss_error / static_cast<double>(ref.df_error);
  auto near = [&](double x, double y, const char* what) {
    if (std::fabs(x - y) > 1e-9) o.fail(fmt::format("{}: {:.12g} vs {:.12g}", what, x, y));
  };
  near(t.term("A").ss, ref.ss_a, "SS A");
  near(t.term("B").ss, ref.ss_b, "SS B");
  near(t.term("A:B").ss, ref.ss_ab, "SS AB");
  near(t.residual.ss, ref.ss_error, "SS error");
  if (t.term("A").df != ref.df_a || t.term("B").df != ref.df_b || t.term("A:B").df != ref.df_ab ||
      t.residual.df != ref.df_error) {
    o.fail("df mismatch");
  }
  near(*t.term("A").f, ref.ss_a / ref.df_a / mse, "F A");
  near(*t.term("B").f, ref.ss_b / ref.df_b / mse, "F B");
  near(*t.term("A:B").f, ref.ss_ab / ref.df_ab / mse, "F AB");

  std::mt19937_64 rng(10);
  std::normal_distribution<double> noise;
  double worst = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Vec v;
    std::vector<std::string> fa, fb;
    const std::size_t n = 15 + rng() % 80;
    for (std::size_t k = 0; k < n; ++k) {
      const int x = static_cast<int>(rng() % 3);
      const int y = static_cast<int>(rng() % 2);
      v.push_back(x * 0.7 - y + noise(rng));
      fa.push_back(std::to_string(x));
      fb.push_back(std::to_string(y));
    }
    const auto table = stats::anova_two_way(v, fa, fb);
    long double mean = 0;
    for (double x : v) mean += x;
    mean /= n;
    long double total = 0;
    for (double x : v) total += (x - mean) * (x - mean);
    worst = std::max(worst, std::fabs(table.ss_model + table.residual.ss - static_cast<double>(total)));
  }
  near(worst, 0.0, "total SS identity");
  if (o.pass) o.detail = fmt::format("2x2 matches cell means, identity error {:.2g}", worst);
  return o;
}

// ---- 11 ---------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "rsa_acceptance_cli";
  std::vector<std::string> failures;
  const auto first = cli::run_pipeline(dir, 1, true, failures);
  const auto second = cli::run_pipeline(dir, 1, true, failures);
  const auto wide = cli::run_pipeline(dir, 8, true, failures);
  std::filesystem::remove_all(dir);
  if (!failures.empty()) o.fail("command failed: " + failures.front());
  if (first != second) o.fail("two runs differ");
  if (first != wide) o.fail("--threads 1 and 8 differ");
  if (o.pass) o.detail = fmt::format("{} files identical over 3 runs", first.size());
  return o;
}

// ---- 12 ---------------------------------------------------------------------

Outcome scale() {
  Outcome o;
  const auto start = Clock::now();
  synth::SynthSpec spec;
  spec.seed = 12;
  spec.conditions = 2368;
  spec.dims = 1024;
  spec.layers = 3;
  const auto data = synth::generate(spec);
  std::vector<Rdm> rdms;
  for (const auto& layer : data.layers) rdms.push_back(build_rdm(layer, Measure::correlation));
  std::size_t reports = 0;
  for (std::size_t a = 0; a < rdms.size(); ++a) {
    for (std::size_t b = a + 1; b < rdms.size(); ++b) {
      const auto v = per_condition_agreement(rdms[a], rdms[b]);
      third_order(v, data.difficulty, 3);
      ++reports;
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 300) o.fail(fmt::format("took {:.1f} s", elapsed));
  if (o.pass) o.detail = fmt::format("3 RDMs, {} pairs, {:.1f} s", reports, elapsed);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"statistics oracle equivalence", statistics_oracles},
      {"tau_a convention", tau_a_convention},
      {"special functions", special_functions},
      {"rdm invariants", rdm_invariants},
      {"second-order properties", second_order},
      {"sign-flip law", sign_flip},
      {"yngve", yngve},
      {"layer grouping", layer_groups},
      {"synthetic reproduction", synthetic_reproduction},
      {"anova correctness", anova},
      {"determinism", determinism},
      {"scale check", scale},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    if (!outcome.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
