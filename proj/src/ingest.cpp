#include "rsa/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "rsa/error.hpp"
#include "rsa/io.hpp"
#include "rsa/numeric.hpp"

namespace rsa {

// ---- ConditionSet -----------------------------------------------------------

ConditionSet::ConditionSet(std::vector<std::string> ids) {
  auto storage = std::make_shared<Storage>();
  storage->index.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i].empty()) throw ValidationError("empty condition id");
    if (!storage->index.emplace(ids[i], i).second) {
      throw ValidationError(fmt::format("duplicate condition '{}'", ids[i]));
    }
  }
  storage->ids = std::move(ids);
  storage_ = std::move(storage);
}

std::span<const std::string> ConditionSet::ids() const {
  if (!storage_) return {};
  return storage_->ids;
}

std::optional<std::size_t> ConditionSet::index_of(std::string_view id) const {
  if (!storage_) return std::nullopt;
  auto it = storage_->index.find(std::string(id));
  if (it == storage_->index.end()) return std::nullopt;
  return it->second;
}

bool operator==(const ConditionSet& a, const ConditionSet& b) {
  if (a.storage_ == b.storage_) return true;
  return std::ranges::equal(a.ids(), b.ids());
}

// ---- LayerId ---------------------------------------------------------------

LayerId LayerId::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw ValidationError(fmt::format("invalid layer id '{}', expected <model>:<int>", text));
  }
  const auto digits = text.substr(colon + 1);
  int index = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ValidationError(fmt::format("invalid layer index in '{}'", text));
  }
  return LayerId{std::string(text.substr(0, colon)), index};
}

std::string LayerId::to_string() const { return fmt::format("{}:{}", model, index); }

// ---- TokenActivations / ActivityMatrix ----------------------------------------

TokenActivations TokenActivations::from_rows(std::string condition_id, LayerId layer,
                                             const std::vector<std::vector<double>>& rows) {
  TokenActivations out{std::move(condition_id), std::move(layer), 0, {}};
  if (rows.empty()) return out;
  out.dims = rows.front().size();
  out.values.reserve(rows.size() * out.dims);
  for (const auto& row : rows) {
    if (row.size() != out.dims) {
      throw ValidationError(fmt::format("ragged token vectors for condition '{}'",
                                        out.condition_id));
    }
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  return out;
}

ActivityMatrix::ActivityMatrix(ConditionSet conditions, LayerId layer, std::size_t cols,
                               std::vector<double> data)
    : conditions_(std::move(conditions)), layer_(std::move(layer)), cols_(cols),
      data_(std::move(data)) {
  if (cols_ == 0) throw ValidationError("activity matrix has zero columns");
  if (data_.size() != conditions_.size() * cols_) {
    throw ValidationError("activity matrix row count does not match condition set");
  }
  if (!std::ranges::all_of(data_, [](double v) { return std::isfinite(v); })) {
    throw ValidationError("invalid activation");
  }
}

std::string_view to_string(FixationMeasure measure) {
  return measure == FixationMeasure::total_fixation ? "total_fixation" : "first_pass";
}

FixationMeasure parse_fixation_measure(std::string_view text) {
  if (text == "total_fixation") return FixationMeasure::total_fixation;
  if (text == "first_pass") return FixationMeasure::first_pass;
  throw ValidationError(fmt::format("unknown fixation measure '{}'", text));
}

SkipPolicy parse_skip_policy(std::string_view text) {
  if (text == "zero") return SkipPolicy::zero;
  if (text == "exclude") return SkipPolicy::exclude;
  throw ValidationError(fmt::format("unknown skip policy '{}'", text));
}

FeatureVector FeatureVector::aligned_to(const ConditionSet& target) const {
  if (conditions == target) return *this;
  FeatureVector out{target, std::vector<double>(target.size()), label};
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto src = conditions.index_of(target.id(i));
    if (!src) {
      throw ValidationError(fmt::format("condition '{}' missing from feature '{}'",
                                        target.id(i), label));
    }
    out.values[i] = values[*src];
  }
  return out;
}

// ---- operations ------------------------------------------------------------

std::vector<double> mean_pool(const TokenActivations& tokens) {
  const std::size_t t_count = tokens.tokens();
  if (t_count == 0) throw ValidationError("empty sentence");
  if (!std::ranges::all_of(tokens.values, [](double v) { return std::isfinite(v); })) {
    throw ValidationError("invalid activation");
  }
  std::vector<double> pooled(tokens.dims);
  std::vector<double> column(t_count);
  for (std::size_t h = 0; h < tokens.dims; ++h) {
    for (std::size_t t = 0; t < t_count; ++t) column[t] = tokens.values[t * tokens.dims + h];
    pooled[h] = numeric::pairwise_sum(column) / static_cast<double>(t_count);
  }
  return pooled;
}

ActivityMatrix build_activity_matrix(std::span<const TokenActivations> records,
                                     const ConditionSet& conditions) {
  if (records.empty()) throw ValidationError("incomplete layer");
  const LayerId& layer = records.front().layer;
  const std::size_t dims = records.front().dims;
  std::vector<const TokenActivations*> slot(conditions.size(), nullptr);
  for (const auto& record : records) {
    if (record.layer != layer) {
      throw ValidationError(fmt::format("mixed layers '{}' and '{}'", layer.to_string(),
                                        record.layer.to_string()));
    }
    if (record.dims != dims) throw ValidationError("dimension mismatch");
    const auto index = conditions.index_of(record.condition_id);
    if (!index) {
      throw ValidationError(fmt::format("unknown condition '{}'", record.condition_id));
    }
    if (slot[*index] != nullptr) {
      throw ValidationError(fmt::format("duplicate condition '{}'", record.condition_id));
    }
    slot[*index] = &record;
  }
  std::vector<double> data;
  data.reserve(conditions.size() * dims);
  for (std::size_t i = 0; i < slot.size(); ++i) {
    if (slot[i] == nullptr) {
      throw ValidationError(fmt::format("incomplete layer: condition '{}' missing from '{}'",
                                        conditions.id(i), layer.to_string()));
    }
    const auto pooled = mean_pool(*slot[i]);
    data.insert(data.end(), pooled.begin(), pooled.end());
  }
  return ActivityMatrix(conditions, layer, dims, std::move(data));
}

double aggregate_fixations(const TokenFixationTable& table, SkipPolicy policy) {
  const std::size_t w_count = table.words.size();
  if (w_count == 0) throw ValidationError("empty sentence");
  if (table.participants == 0) throw ValidationError("no participants");
  if (table.durations.size() != w_count * table.participants) {
    throw ValidationError("fixation table shape mismatch");
  }
  double total = 0.0;
  for (std::size_t w = 0; w < w_count; ++w) {
    double word_sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t p = 0; p < table.participants; ++p) {
      const double d = table.at(w, p);
      if (!(d >= 0.0) || !std::isfinite(d)) {
        throw ValidationError(fmt::format("invalid duration in condition '{}'",
                                          table.condition_id));
      }
      if (policy == SkipPolicy::exclude && d == 0.0) continue;
      word_sum += d;
      ++counted;
    }
    if (counted > 0) total += word_sum / static_cast<double>(counted);
  }
  return total / static_cast<double>(w_count);
}

FeatureVector build_feature_vector(std::span<const TokenFixationTable> tables,
                                   const ConditionSet& conditions, SkipPolicy policy) {
  if (tables.empty()) throw ValidationError("no fixation tables");
  const FixationMeasure measure = tables.front().measure;
  std::vector<std::optional<double>> slot(conditions.size());
  for (const auto& table : tables) {
    if (table.measure != measure) throw ValidationError("mixed measure tags");
    const auto index = conditions.index_of(table.condition_id);
    if (!index) throw ValidationError(fmt::format("unknown condition '{}'", table.condition_id));
    if (slot[*index]) {
      throw ValidationError(fmt::format("duplicate condition '{}'", table.condition_id));
    }
    slot[*index] = aggregate_fixations(table, policy);
  }
  FeatureVector out{conditions, {}, std::string(to_string(measure))};
  out.values.reserve(slot.size());
  for (std::size_t i = 0; i < slot.size(); ++i) {
    if (!slot[i]) {
      throw ValidationError(fmt::format("missing condition '{}'", conditions.id(i)));
    }
    out.values.push_back(*slot[i]);
  }
  return out;
}

// ---- file formats ----------------------------------------------------------

std::vector<TokenActivations> read_activations(const std::filesystem::path& path) {
  std::vector<TokenActivations> records;
  const auto lines = io::read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (io::trim(lines[n]).empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(lines[n]);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(fmt::format("{}:{}: malformed JSON ({})", path.string(), n + 1,
                                        e.what()));
    }
    try {
      auto vectors = row.at("vectors").get<std::vector<std::vector<double>>>();
      records.push_back(TokenActivations::from_rows(row.at("id").get<std::string>(),
                                                    LayerId::parse(row.at("layer").get<std::string>()),
                                                    vectors));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(fmt::format("{}:{}: bad activation record ({})", path.string(),
                                        n + 1, e.what()));
    }
  }
  return records;
}

void write_activations(const std::filesystem::path& path,
                       std::span<const TokenActivations> records) {
  std::string out;
  for (const auto& record : records) {
    out += "{\"id\": ";
    out += nlohmann::json(record.condition_id).dump();
    out += ", \"layer\": ";
    out += nlohmann::json(record.layer.to_string()).dump();
    out += ", \"vectors\": [";
    for (std::size_t t = 0; t < record.tokens(); ++t) {
      if (t > 0) out += ", ";
      out += '[';
      const auto token = record.token(t);
      for (std::size_t h = 0; h < token.size(); ++h) {
        if (h > 0) out += ", ";
        out += io::format_number(token[h]);
      }
      out += ']';
    }
    out += "]}\n";
  }
  io::write_text(path, out);
}

ConditionSet conditions_of(std::span<const TokenActivations> records) {
  std::vector<std::string> ids;
  std::set<std::string_view> seen;
  for (const auto& record : records) {
    if (seen.insert(record.condition_id).second) ids.push_back(record.condition_id);
  }
  return ConditionSet(std::move(ids));
}

std::vector<LayerId> layers_of(std::span<const TokenActivations> records) {
  std::vector<LayerId> layers;
  for (const auto& record : records) {
    if (std::ranges::find(layers, record.layer) == layers.end()) layers.push_back(record.layer);
  }
  return layers;
}

void write_pooled(const std::filesystem::path& path, const ActivityMatrix& matrix) {
  std::string out = "id";
  for (std::size_t h = 0; h < matrix.cols(); ++h) out += fmt::format(",d{}", h);
  out += '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out += io::quote_field(matrix.conditions().id(i));
    for (double v : matrix.row(i)) {
      out += ',';
      out += io::format_number(v);
    }
    out += '\n';
  }
  io::write_text(path, out);
}

ActivityMatrix read_pooled(const std::filesystem::path& path, LayerId layer) {
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw ValidationError(fmt::format("{}: empty pooled matrix", path.string()));
  const auto header = io::split_fields(lines.front());
  if (header.size() < 2 || header.front() != "id") {
    throw ValidationError(fmt::format("{}: expected header id,d0,...", path.string()));
  }
  const std::size_t cols = header.size() - 1;
  std::vector<std::string> ids;
  std::vector<double> data;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto fields = io::split_fields(lines[n]);
    if (fields.size() != cols + 1) {
      throw ValidationError(fmt::format("{}:{}: dimension mismatch", path.string(), n + 1));
    }
    ids.push_back(fields[0]);
    for (std::size_t h = 1; h < fields.size(); ++h) {
      data.push_back(io::parse_double(fields[h], "activation"));
    }
  }
  return ActivityMatrix(ConditionSet(std::move(ids)), std::move(layer), cols, std::move(data));
}

std::vector<TokenFixationTable> read_fixations(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw ValidationError(fmt::format("{}: empty fixation file", path.string()));
  const auto header = io::split_fields(lines.front());
  const std::vector<std::string> expected{"id", "word_index", "word", "participant",
                                          "duration_ms", "measure"};
  if (header != expected) {
    throw ValidationError(fmt::format(
        "{}: expected header id,word_index,word,participant,duration_ms,measure", path.string()));
  }

  struct Sentence {
    std::map<long long, std::string> words;
    std::map<std::pair<long long, std::string>, double> cells;
  };
  // keyed by measure, then condition in order of first appearance
  std::map<FixationMeasure, std::vector<std::string>> order;
  std::map<FixationMeasure, std::map<std::string, Sentence>> sentences;
  std::map<FixationMeasure, std::set<std::string>> participants;

  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = io::split_fields(lines[n]);
    if (f.size() != expected.size()) {
      throw ValidationError(fmt::format("{}:{}: expected 6 fields", path.string(), n + 1));
    }
    const auto measure = parse_fixation_measure(f[5]);
    const long long word_index = io::parse_int(f[1], "word_index");
    const double duration = io::parse_double(f[4], "duration_ms");
    if (!(duration >= 0.0) || !std::isfinite(duration)) {
      throw ValidationError(fmt::format("{}:{}: negative duration", path.string(), n + 1));
    }
    auto& by_id = sentences[measure];
    if (!by_id.contains(f[0])) order[measure].push_back(f[0]);
    auto& sentence = by_id[f[0]];
    sentence.words.emplace(word_index, f[2]);
    sentence.cells[{word_index, f[3]}] += duration;
    participants[measure].insert(f[3]);
  }

  std::vector<TokenFixationTable> tables;
  for (const auto& [measure, ids] : order) {
    const auto& people = participants[measure];
    for (const auto& id : ids) {
      const auto& sentence = sentences[measure][id];
      TokenFixationTable table;
      table.condition_id = id;
      table.measure = measure;
      table.participants = people.size();
      table.durations.assign(sentence.words.size() * people.size(), 0.0);
      std::size_t w = 0;
      for (const auto& [word_index, word] : sentence.words) {
        table.words.push_back(word);
        std::size_t p = 0;
        for (const auto& person : people) {
          auto it = sentence.cells.find({word_index, person});
          if (it != sentence.cells.end()) table.durations[w * people.size() + p] = it->second;
          ++p;
        }
        ++w;
      }
      tables.push_back(std::move(table));
    }
  }
  return tables;
}

void write_feature(const std::filesystem::path& path, const FeatureVector& feature) {
  std::string out = "id,value\n";
  for (std::size_t i = 0; i < feature.values.size(); ++i) {
    out += io::quote_field(feature.conditions.id(i));
    out += ',';
    out += io::format_number(feature.values[i]);
    out += '\n';
  }
  io::write_text(path, out);
}

FeatureVector read_feature(const std::filesystem::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty() || io::split_fields(lines.front()) != std::vector<std::string>{"id", "value"}) {
    throw ValidationError(fmt::format("{}: expected header id,value", path.string()));
  }
  std::vector<std::string> ids;
  std::vector<double> values;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto f = io::split_fields(lines[n]);
    if (f.size() != 2) throw ValidationError(fmt::format("{}:{}: expected 2 fields", path.string(), n + 1));
    ids.push_back(f[0]);
    const double v = io::parse_double(f[1], "feature value");
    if (!std::isfinite(v)) throw ValidationError(fmt::format("{}:{}: non-finite value", path.string(), n + 1));
    values.push_back(v);
  }
  return FeatureVector{ConditionSet(std::move(ids)), std::move(values),
                       path.stem().string()};
}

}  // namespace rsa
