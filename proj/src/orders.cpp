#include "rsa/orders.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include <fmt/format.h>

#include "rsa/error.hpp"
#include "rsa/io.hpp"
#include "rsa/parallel.hpp"

namespace rsa {

// ---- LayerPair ---------------------------------------------------------------

LayerPair LayerPair::make(LayerId a, LayerId b) {
  if (a == b) throw ValidationError(fmt::format("layer pair needs two distinct layers ({})", a.to_string()));
  if (b < a) std::swap(a, b);
  return LayerPair{std::move(a), std::move(b)};
}

LayerPair LayerPair::parse(std::string_view label) {
  static const std::regex pattern(R"(^(.+:\d+)-(.+:\d+)$)");
  std::match_results<std::string_view::const_iterator> match;
  if (!std::regex_match(label.begin(), label.end(), match, pattern)) {
    throw ValidationError(fmt::format("invalid layer pair '{}'", label));
  }
  return make(LayerId::parse(match.str(1)), LayerId::parse(match.str(2)));
}

std::string LayerPair::label() const { return first.to_string() + "-" + second.to_string(); }

bool LayerPair::adjacent() const {
  return same_model() && std::abs(first.index - second.index) == 1;
}

// ---- second order --------------------------------------------------------------

std::vector<double> DisagreementVector::disagreement() const {
  std::vector<double> out(agreement.size());
  std::ranges::transform(agreement, out.begin(), [](double v) { return 1.0 - v; });
  return out;
}

DisagreementVector per_condition_agreement(const Rdm& a, const Rdm& b,
                                           const AgreementOptions& options) {
  if (!(a.conditions() == b.conditions())) throw ValidationError("condition-set mismatch");
  const std::size_t n = a.size();
  if (n < 4) throw ValidationError("per-condition agreement needs at least 4 conditions");

  DisagreementVector out;
  out.first_label = a.label();
  out.second_label = b.label();
  out.conditions = a.conditions();
  out.statistic = options.statistic;
  out.agreement.assign(n, 0.0);

  parallel::for_each_index(n, [&](std::size_t s) {
    std::vector<double> row_a;
    std::vector<double> row_b;
    row_a.reserve(n);
    row_b.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s && !options.include_self) continue;
      row_a.push_back(a(s, t));
      row_b.push_back(b(s, t));
    }
    try {
      out.agreement[s] = stats::correlation_coefficient(options.statistic, row_a, row_b);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("row '{}': {}", a.conditions().id(s), e.what()));
    }
  });
  return out;
}

Rsm rsm(std::span<const Rdm> rdms, stats::CorrelationMethod statistic) {
  if (rdms.size() < 2) throw ValidationError("RSM needs at least 2 RDMs");
  for (const auto& rdm : rdms) {
    if (!(rdm.conditions() == rdms.front().conditions())) {
      throw ValidationError("condition-set mismatch");
    }
  }
  const std::size_t k = rdms.size();
  std::vector<std::vector<double>> triangles(k);
  for (std::size_t i = 0; i < k; ++i) triangles[i] = rdms[i].upper_triangle();

  Rsm out;
  for (const auto& rdm : rdms) out.labels.push_back(rdm.label());
  out.data.assign(k * k, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) cells.emplace_back(i, j);
  }
  parallel::for_each_index(cells.size(), [&](std::size_t c) {
    const auto [i, j] = cells[c];
    const double v = stats::correlation_coefficient(statistic, triangles[i], triangles[j]);
    out.data[i * k + j] = v;
    out.data[j * k + i] = v;
  });
  return out;
}

ThirdOrderReport third_order(const DisagreementVector& vector, const FeatureVector& feature,
                             std::size_t n_tests,
                             const std::optional<PermutationSettings>& permutation) {
  if (!(vector.conditions == feature.conditions)) throw ValidationError("condition-set mismatch");
  ThirdOrderReport out;
  out.pair_label = vector.pair_label();
  out.target = feature.label;
  out.agreement = permutation
                      ? stats::spearman_rho_permutation(vector.agreement, feature.values,
                                                        permutation->seed, permutation->draws, n_tests)
                      : stats::spearman_rho(vector.agreement, feature.values, n_tests);
  out.disagreement_coefficient = -out.agreement.coefficient;
  return out;
}

// ---- layer groups ----------------------------------------------------------------

std::string_view to_string(LayerGroup group) {
  switch (group) {
    case LayerGroup::low: return "low";
    case LayerGroup::middle: return "middle";
    case LayerGroup::high: return "high";
    case LayerGroup::out: return "out";
    case LayerGroup::excluded: return "excluded";
  }
  return "unknown";
}

LayerGroup assign_layer_group(const LayerPair& pair, int n_layers) {
  if (n_layers < 3 || n_layers % 3 != 0) {
    throw ValidationError(fmt::format("layer count {} does not split into three equal bands", n_layers));
  }
  if (!pair.same_model()) throw ValidationError("layer groups need a same-model pair");
  const int i = pair.first.index;
  const int j = pair.second.index;
  if (i < 1 || j < 1 || i > n_layers || j > n_layers) {
    throw ValidationError(fmt::format("layer index out of range 1..{} in '{}'", n_layers, pair.label()));
  }
  const int width = n_layers / 3;
  const int band_i = (i - 1) / width;
  const int band_j = (j - 1) / width;
  if (band_i == band_j) {
    constexpr LayerGroup bands[] = {LayerGroup::low, LayerGroup::middle, LayerGroup::high};
    return bands[band_i];
  }
  if (std::abs(i - j) > width - 1) return LayerGroup::out;
  return LayerGroup::excluded;
}

LayerOrder parse_layer_order(std::string_view text) {
  if (text == "top-down") return LayerOrder::top_down;
  if (text == "bottom-up") return LayerOrder::bottom_up;
  throw ValidationError(fmt::format("unknown layer order '{}'", text));
}

LayerId to_top_down(const LayerId& layer, int n_layers, LayerOrder order) {
  if (layer.index < 1 || layer.index > n_layers) {
    throw ValidationError(fmt::format("layer index out of range 1..{}: '{}'", n_layers, layer.to_string()));
  }
  if (order == LayerOrder::top_down) return layer;
  return LayerId{layer.model, n_layers + 1 - layer.index};
}

GroupAnovaResult group_anova(std::span<const double> values, std::span<const LayerPair> pairs,
                             int n_layers) {
  if (values.size() != pairs.size()) throw ValidationError("values and pairs differ in length");
  GroupAnovaResult result;
  std::vector<double> kept;
  std::vector<std::string> group_labels;
  std::vector<std::string> adjacency_labels;
  std::map<LayerGroup, std::vector<double>> by_group;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const LayerGroup group = assign_layer_group(pairs[k], n_layers);
    if (group == LayerGroup::excluded) {
      ++result.excluded;
      continue;
    }
    kept.push_back(values[k]);
    group_labels.emplace_back(to_string(group));
    adjacency_labels.emplace_back(pairs[k].adjacent() ? "adjacent" : "non_adjacent");
    by_group[group].push_back(values[k]);
  }
  result.table = stats::anova_two_way(kept, group_labels, adjacency_labels, "group", "adjacency");
  for (const auto& [group, members] : by_group) {
    GroupSummary summary;
    summary.group = group;
    summary.count = members.size();
    double sum = 0.0;
    for (double v : members) sum += v;
    summary.mean = sum / static_cast<double>(members.size());
    double ss = 0.0;
    for (double v : members) ss += (v - summary.mean) * (v - summary.mean);
    summary.stddev = std::sqrt(ss / static_cast<double>(members.size()));
    result.groups.push_back(summary);
  }
  return result;
}

// ---- heatmaps ------------------------------------------------------------------

HeatmapGrid heatmap_grid(std::span<const PairValue> values, int n_layers) {
  if (n_layers < 2) throw ValidationError("heatmap needs at least 2 layers");
  HeatmapGrid grid;
  grid.n_layers = n_layers;
  const auto n = static_cast<std::size_t>(n_layers);
  grid.cells.assign(n * n, std::nullopt);
  std::string model;
  for (const auto& [pair, value] : values) {
    if (!pair.same_model()) throw ValidationError(fmt::format("cross-model pair '{}' in heatmap", pair.label()));
    if (model.empty()) model = pair.first.model;
    if (pair.first.model != model) throw ValidationError("heatmap pairs span several models");
    const int i = pair.first.index;
    const int j = pair.second.index;
    if (i < 1 || j < 1 || i > n_layers || j > n_layers) {
      throw ValidationError(fmt::format("layer index out of range 1..{} in '{}'", n_layers, pair.label()));
    }
    auto& upper = grid.cells[static_cast<std::size_t>((i - 1) * n_layers + (j - 1))];
    if (upper) throw ValidationError(fmt::format("duplicate pair '{}'", pair.label()));
    upper = value;
    grid.cells[static_cast<std::size_t>((j - 1) * n_layers + (i - 1))] = value;
  }
  for (int i = 1; i <= n_layers; ++i) {
    for (int j = i + 1; j <= n_layers; ++j) {
      if (!grid.at(i, j)) throw ValidationError(fmt::format("missing pair {}-{}", i, j));
    }
  }
  return grid;
}

void write_heatmap(const std::filesystem::path& path, const HeatmapGrid& grid) {
  std::string out;
  for (int j = 1; j <= grid.n_layers; ++j) out += fmt::format(",{}", j);
  out += '\n';
  for (int i = 1; i <= grid.n_layers; ++i) {
    out += std::to_string(i);
    for (int j = 1; j <= grid.n_layers; ++j) {
      out += ',';
      if (const auto& cell = grid.at(i, j)) out += io::format_number(*cell);
    }
    out += '\n';
  }
  io::write_text(path, out);
}

HeatmapGrid read_heatmap(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw ValidationError(fmt::format("{}: empty heatmap", path.string()));
  const auto header = io::split_fields(lines.front());
  const int n = static_cast<int>(header.size()) - 1;
  if (n < 1 || !header.front().empty()) {
    throw ValidationError(fmt::format("{}: malformed heatmap header", path.string()));
  }
  for (int j = 1; j <= n; ++j) {
    if (io::parse_int(header[static_cast<std::size_t>(j)], "layer index") != j) {
      throw ValidationError(fmt::format("{}: heatmap columns must be 1..n", path.string()));
    }
  }
  HeatmapGrid grid;
  grid.n_layers = n;
  grid.cells.assign(static_cast<std::size_t>(n * n), std::nullopt);
  int i = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    ++i;
    const auto fields = io::split_fields(lines[k]);
    if (i > n || static_cast<int>(fields.size()) != n + 1 ||
        io::parse_int(fields.front(), "layer index") != i) {
      throw ValidationError(fmt::format("{}:{}: malformed heatmap row", path.string(), k + 1));
    }
    for (int j = 1; j <= n; ++j) {
      const auto& field = fields[static_cast<std::size_t>(j)];
      if (!field.empty()) {
        grid.cells[static_cast<std::size_t>((i - 1) * n + (j - 1))] = io::parse_double(field, "heatmap cell");
      }
    }
  }
  if (i != n) throw ValidationError(fmt::format("{}: heatmap is not square", path.string()));
  return grid;
}

// ---- file formats ----------------------------------------------------------------

void write_disagreement(const std::filesystem::path& path, const DisagreementVector& vector) {
  std::string out = "id,agreement,disagreement\n";
  for (std::size_t i = 0; i < vector.agreement.size(); ++i) {
    out += io::quote_field(vector.conditions.id(i));
    out += ',';
    out += io::format_number(vector.agreement[i]);
    out += ',';
    out += io::format_number(1.0 - vector.agreement[i]);
    out += '\n';
  }
  io::write_text(path, out);
}

DisagreementVector read_disagreement(const std::filesystem::path& path, std::string_view pair_label) {
  const auto lines = io::read_lines(path);
  const std::vector<std::string> expected{"id", "agreement", "disagreement"};
  if (lines.empty() || io::split_fields(lines.front()) != expected) {
    throw ValidationError(fmt::format("{}: expected header id,agreement,disagreement", path.string()));
  }
  DisagreementVector out;
  const auto pair = LayerPair::parse(pair_label);
  out.first_label = pair.first.to_string();
  out.second_label = pair.second.to_string();
  std::vector<std::string> ids;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = io::split_fields(lines[k]);
    if (fields.size() != 3) throw ValidationError(fmt::format("{}:{}: expected 3 fields", path.string(), k + 1));
    ids.push_back(fields[0]);
    const double agreement = io::parse_double(fields[1], "agreement");
    if (!(agreement >= -1.0 && agreement <= 1.0)) {
      throw ValidationError(fmt::format("{}:{}: agreement outside [-1, 1]", path.string(), k + 1));
    }
    out.agreement.push_back(agreement);
  }
  out.conditions = ConditionSet(std::move(ids));
  return out;
}

void write_rsm(const std::filesystem::path& path, const Rsm& matrix) {
  std::string out;
  for (const auto& label : matrix.labels) {
    out += ',';
    out += io::quote_field(label);
  }
  out += '\n';
  for (std::size_t a = 0; a < matrix.size(); ++a) {
    out += io::quote_field(matrix.labels[a]);
    for (std::size_t b = 0; b < matrix.size(); ++b) {
      out += ',';
      out += io::format_number(matrix(a, b));
    }
    out += '\n';
  }
  io::write_text(path, out);
}

void write_pair_values(const std::filesystem::path& path, std::span<const PairValue> values) {
  std::string out = "pair,value\n";
  for (const auto& [pair, value] : values) {
    out += io::quote_field(pair.label());
    out += ',';
    out += io::format_number(value);
    out += '\n';
  }
  io::write_text(path, out);
}

std::vector<PairValue> read_pair_values(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  const std::vector<std::string> expected{"pair", "value"};
  if (lines.empty() || io::split_fields(lines.front()) != expected) {
    throw ValidationError(fmt::format("{}: expected header pair,value", path.string()));
  }
  std::vector<PairValue> out;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = io::split_fields(lines[k]);
    if (fields.size() != 2) throw ValidationError(fmt::format("{}:{}: expected 2 fields", path.string(), k + 1));
    out.push_back(PairValue{LayerPair::parse(fields[0]), io::parse_double(fields[1], "value")});
  }
  return out;
}

std::vector<ReportRow> report_rows(const ThirdOrderReport& report) {
  ReportRow agreement{report.pair_label, report.agreement, report.target, "agreement"};
  ReportRow disagreement = agreement;
  disagreement.report.coefficient = report.disagreement_coefficient;
  disagreement.form = "disagreement";
  return {agreement, disagreement};
}

std::string format_report(std::span<const ReportRow> rows) {
  std::string out = "pair\tcoefficient\tn\tp_raw\tp_bonferroni\tn_tests\tmethod\ttarget\tform\n";
  for (const auto& row : rows) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", row.pair,
                       io::format_number(row.report.coefficient, io::kReportDigits), row.report.n,
                       io::format_number(row.report.p_raw, io::kReportDigits),
                       io::format_number(row.report.p_adjusted, io::kReportDigits),
                       row.report.n_tests, stats::to_string(row.report.method), row.target, row.form);
  }
  return out;
}

std::vector<ReportRow> read_report(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  const std::vector<std::string> expected{"pair",    "coefficient", "n",      "p_raw", "p_bonferroni",
                                          "n_tests", "method",      "target", "form"};
  if (lines.empty() || io::split_fields(lines.front(), '\t') != expected) {
    throw ValidationError(fmt::format("{}: unexpected report header", path.string()));
  }
  std::vector<ReportRow> rows;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto f = io::split_fields(lines[k], '\t');
    if (f.size() != expected.size()) {
      throw ValidationError(fmt::format("{}:{}: expected {} fields", path.string(), k + 1, expected.size()));
    }
    ReportRow row;
    row.pair = f[0];
    row.report.coefficient = io::parse_double(f[1], "coefficient");
    row.report.n = static_cast<std::size_t>(io::parse_int(f[2], "n"));
    row.report.p_raw = io::parse_double(f[3], "p_raw");
    row.report.p_adjusted = io::parse_double(f[4], "p_bonferroni");
    row.report.n_tests = static_cast<std::size_t>(io::parse_int(f[5], "n_tests"));
    row.report.method = stats::parse_correlation_method(f[6]);
    row.target = f[7];
    row.form = f[8];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rsa
