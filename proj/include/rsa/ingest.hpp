#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rsa {

// Ordered, duplicate-free list of condition (sentence) identifiers shared by
// every matrix and vector derived from one dataset. Copies share storage.
class ConditionSet {
 public:
  ConditionSet() = default;
  explicit ConditionSet(std::vector<std::string> ids);

  std::size_t size() const { return storage_ ? storage_->ids.size() : 0; }
  const std::string& id(std::size_t i) const { return storage_->ids[i]; }
  std::span<const std::string> ids() const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  friend bool operator==(const ConditionSet& a, const ConditionSet& b);

 private:
  struct Storage {
    std::vector<std::string> ids;
    std::unordered_map<std::string, std::size_t> index;
  };
  std::shared_ptr<const Storage> storage_;
};

// "<model>:<index>", e.g. "bert:11".
struct LayerId {
  std::string model;
  int index = 0;

  static LayerId parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const LayerId&, const LayerId&) = default;
  friend auto operator<=>(const LayerId&, const LayerId&) = default;
};

// Per-token states for one condition under one layer: T rows of H values.
struct TokenActivations {
  std::string condition_id;
  LayerId layer;
  std::size_t dims = 0;
  std::vector<double> values;  // row-major, T * dims

  std::size_t tokens() const { return dims == 0 ? 0 : values.size() / dims; }
  std::span<const double> token(std::size_t t) const {
    return std::span<const double>(values).subspan(t * dims, dims);
  }

  static TokenActivations from_rows(std::string condition_id, LayerId layer,
                                    const std::vector<std::vector<double>>& rows);
};

// N x H pooled activity patterns for one layer, rows in ConditionSet order.
class ActivityMatrix {
 public:
  ActivityMatrix(ConditionSet conditions, LayerId layer, std::size_t cols,
                 std::vector<double> data);

  const ConditionSet& conditions() const { return conditions_; }
  const LayerId& layer() const { return layer_; }
  std::size_t rows() const { return conditions_.size(); }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const { return data_; }

 private:
  ConditionSet conditions_;
  LayerId layer_;
  std::size_t cols_;
  std::vector<double> data_;
};

enum class FixationMeasure { total_fixation, first_pass };
std::string_view to_string(FixationMeasure measure);
FixationMeasure parse_fixation_measure(std::string_view text);

// How a zero (skipped) fixation enters the participant average.
//   zero:    counts as 0 ms, participant stays in the denominator.
//   exclude: dropped from the word's participant average; a word nobody
//            fixated contributes 0 ms and still counts toward W.
enum class SkipPolicy { zero, exclude };
SkipPolicy parse_skip_policy(std::string_view text);

// Word-level durations (ms) for one sentence: W words x P participants.
struct TokenFixationTable {
  std::string condition_id;
  std::vector<std::string> words;
  std::size_t participants = 0;
  std::vector<double> durations;  // row-major, W * P
  FixationMeasure measure = FixationMeasure::total_fixation;

  double at(std::size_t word, std::size_t participant) const {
    return durations[word * participants + participant];
  }
};

// One scalar per condition, in ConditionSet order.
struct FeatureVector {
  ConditionSet conditions;
  std::vector<double> values;
  std::string label;

  // Reorders (by id) onto `target`; every target id must be present.
  FeatureVector aligned_to(const ConditionSet& target) const;
};

std::vector<double> mean_pool(const TokenActivations& tokens);

ActivityMatrix build_activity_matrix(std::span<const TokenActivations> records,
                                     const ConditionSet& conditions);

double aggregate_fixations(const TokenFixationTable& table,
                           SkipPolicy policy = SkipPolicy::zero);

FeatureVector build_feature_vector(std::span<const TokenFixationTable> tables,
                                   const ConditionSet& conditions,
                                   SkipPolicy policy = SkipPolicy::zero);

// ---- file formats ---------------------------------------------------------

// JSON lines: {"id": ..., "layer": "<model>:<int>", "vectors": [[...], ...]}
std::vector<TokenActivations> read_activations(const std::filesystem::path& path);
void write_activations(const std::filesystem::path& path,
                       std::span<const TokenActivations> records);

// Condition ids in order of first appearance.
ConditionSet conditions_of(std::span<const TokenActivations> records);
std::vector<LayerId> layers_of(std::span<const TokenActivations> records);

// CSV "id,d0,...,d{H-1}".
void write_pooled(const std::filesystem::path& path, const ActivityMatrix& matrix);
ActivityMatrix read_pooled(const std::filesystem::path& path, LayerId layer);

// CSV "id,word_index,word,participant,duration_ms,measure". Participants are
// collected per measure over the whole file; absent (word, participant) cells
// are skips and hold 0. Repeated rows for the same cell are summed.
std::vector<TokenFixationTable> read_fixations(const std::filesystem::path& path);

// CSV "id,value".
void write_feature(const std::filesystem::path& path, const FeatureVector& feature);
FeatureVector read_feature(const std::filesystem::path& path);

}  // namespace rsa
