#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "manifest.hpp"

namespace rsa::cli {

using std::filesystem::path;

struct RdmOptions {
  path activations;
  path pooled;
  std::string layer;
  std::string metric = "correlation";
  double ridge = 0.0;
  path write_pooled;
  path out;
};

struct RsmOptions {
  std::vector<path> rdms;
  std::string stat = "kendall_a";
  path out;
};

struct DisagreeOptions {
  path rdm_a;
  path rdm_b;
  std::string stat = "kendall_a";
  bool include_self = false;
  path out;
};

struct ThirdOptions {
  std::vector<path> disagreements;
  std::vector<std::string> labels;  // defaults to the file stems
  std::vector<path> features;
  std::size_t n_tests = 0;          // 0: one per (disagreement, feature) combination
  std::size_t permutations = 0;     // 0: t approximation
  std::uint64_t seed = 0;
  path out;
};

struct FeatureOptions {
  std::string kind;  // yngve, logfreq, senses, fixation
  path trees;
  path sentences;
  path lexicon;
  path fixations;
  bool strip_punct = false;
  std::string measure = "total_fixation";
  std::string skip_policy = "zero";
  path out;
};

// Where per-pair values come from for anova and heatmap.
struct PairSelection {
  path report;
  path values;
  std::string form = "disagreement";
  std::string target;
  std::string model;
  int n_layers = 24;
  std::string layer_order = "top-down";
};

struct GridOptions {
  PairSelection selection;
  path out;
};

struct SynthOptions {
  std::string kind = "activations";  // activations, bands
  std::uint64_t seed = 0;
  std::size_t n = 256;
  std::size_t h = 32;
  std::size_t layers = 4;
  double noise_gain = 1.0;
  std::vector<double> drift;          // defaults to l / layers for l = 1..layers
  std::string difficulty = "linear";  // linear, random, constant
  std::string model = "synth";
  int n_layers = 24;
  double base = 0.7;
  double middle_shift = 0.2;
  double noise_sd = 0.05;
  path out_dir;
};

RunRecord cmd_rdm(const RdmOptions& options);
RunRecord cmd_rsm(const RsmOptions& options);
RunRecord cmd_disagree(const DisagreeOptions& options);
RunRecord cmd_third(const ThirdOptions& options);
RunRecord cmd_features(const FeatureOptions& options);
RunRecord cmd_anova(const GridOptions& options);
RunRecord cmd_heatmap(const GridOptions& options);
RunRecord cmd_synth(const SynthOptions& options);

// One JSON object per line on standard error.
void warn(const std::string& kind, const std::string& message);

}  // namespace rsa::cli
