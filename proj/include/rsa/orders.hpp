#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsa/anova.hpp"
#include "rsa/ingest.hpp"
#include "rsa/rankstats.hpp"
#include "rsa/rdm.hpp"

namespace rsa {

// Unordered layer pair, canonicalized so that first < second (model tag,
// then index).
struct LayerPair {
  LayerId first;
  LayerId second;

  static LayerPair make(LayerId a, LayerId b);
  // "<model>:<i>-<model>:<j>"
  static LayerPair parse(std::string_view label);
  std::string label() const;

  bool same_model() const { return first.model == second.model; }
  bool adjacent() const;
};

// Per-condition row agreement (V_Corr) between two RDMs. Disagreement is
// 1 - agreement and is never stored.
struct DisagreementVector {
  std::string first_label;
  std::string second_label;
  ConditionSet conditions;
  std::vector<double> agreement;
  stats::CorrelationMethod statistic = stats::CorrelationMethod::kendall_a;

  std::string pair_label() const { return first_label + "-" + second_label; }
  std::vector<double> disagreement() const;
};

struct AgreementOptions {
  stats::CorrelationMethod statistic = stats::CorrelationMethod::kendall_a;
  // Keep the structural zero at the row's own index (sensitivity analysis).
  bool include_self = false;
};

DisagreementVector per_condition_agreement(const Rdm& a, const Rdm& b,
                                           const AgreementOptions& options = {});

// K x K whole-RDM comparison over strict upper triangles; diagonal is 1.
struct Rsm {
  std::vector<std::string> labels;
  std::vector<double> data;

  std::size_t size() const { return labels.size(); }
  double operator()(std::size_t a, std::size_t b) const { return data[a * size() + b]; }
};

Rsm rsm(std::span<const Rdm> rdms,
        stats::CorrelationMethod statistic = stats::CorrelationMethod::kendall_a);

struct PermutationSettings {
  std::uint64_t seed = 0;
  std::size_t draws = stats::kDefaultPermutations;
};

// Spearman between the agreement vector and a feature, Bonferroni-adjusted.
// The disagreement-form coefficient is the exact negation: ranking 1 - x
// reverses the ranking of x.
struct ThirdOrderReport {
  std::string pair_label;
  std::string target;
  stats::CorrelationReport agreement;
  double disagreement_coefficient = 0.0;
};

ThirdOrderReport third_order(const DisagreementVector& vector, const FeatureVector& feature,
                             std::size_t n_tests,
                             const std::optional<PermutationSettings>& permutation = std::nullopt);

// ---- layer groups ------------------------------------------------------------

enum class LayerGroup { low, middle, high, out, excluded };
std::string_view to_string(LayerGroup group);

// Layers numbered 1 (topmost) .. n_layers. Three equal bands of width
// n_layers / 3; a pair inside one band takes that band, otherwise it is
// "out" when |i - j| > width - 1 and "excluded" otherwise. For 24 layers:
// low [1,8], middle [9,16], high [17,24], out |i-j| > 7.
LayerGroup assign_layer_group(const LayerPair& pair, int n_layers);

enum class LayerOrder { top_down, bottom_up };
LayerOrder parse_layer_order(std::string_view text);

// Maps a producer's layer numbering onto 1 = topmost.
LayerId to_top_down(const LayerId& layer, int n_layers, LayerOrder order);

struct GroupSummary {
  LayerGroup group = LayerGroup::low;
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

struct GroupAnovaResult {
  stats::AnovaTable table;
  std::vector<GroupSummary> groups;  // low, middle, high, out (observed only)
  std::size_t excluded = 0;
};

// Two-way ANOVA of per-pair values on group x adjacency, after dropping
// excluded pairs. Pairs are expected in top-down numbering.
GroupAnovaResult group_anova(std::span<const double> values, std::span<const LayerPair> pairs,
                             int n_layers);

// ---- heatmaps ------------------------------------------------------------------

struct PairValue {
  LayerPair pair;
  double value = 0.0;
};

// n x n symmetric grid indexed by 1-based layer; diagonal cells are empty.
struct HeatmapGrid {
  int n_layers = 0;
  std::vector<std::optional<double>> cells;

  const std::optional<double>& at(int i, int j) const {
    return cells[static_cast<std::size_t>((i - 1) * n_layers + (j - 1))];
  }
};

// Every unordered same-model pair of 1..n_layers must appear exactly once.
HeatmapGrid heatmap_grid(std::span<const PairValue> values, int n_layers);

void write_heatmap(const std::filesystem::path& path, const HeatmapGrid& grid);
HeatmapGrid read_heatmap(const std::filesystem::path& path);

// ---- file formats ----------------------------------------------------------------

// CSV "id,agreement,disagreement".
void write_disagreement(const std::filesystem::path& path, const DisagreementVector& vector);
DisagreementVector read_disagreement(const std::filesystem::path& path,
                                     std::string_view pair_label);

void write_rsm(const std::filesystem::path& path, const Rsm& matrix);

// CSV "pair,value" with pair labels "<model>:<i>-<model>:<j>".
void write_pair_values(const std::filesystem::path& path, std::span<const PairValue> values);
std::vector<PairValue> read_pair_values(const std::filesystem::path& path);

// One report line. `form` is "agreement", "disagreement" or "feature".
struct ReportRow {
  std::string pair;
  stats::CorrelationReport report;
  std::string target;
  std::string form;
};

std::vector<ReportRow> report_rows(const ThirdOrderReport& report);

// TSV "pair coefficient n p_raw p_bonferroni n_tests method target form".
std::string format_report(std::span<const ReportRow> rows);
std::vector<ReportRow> read_report(const std::filesystem::path& path);

}  // namespace rsa
