#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rsa/tree.hpp"

namespace rsa {

// Yngve depth per leaf, left to right: the children of a node with k
// children score k-1, k-2, ..., 0 and a leaf's depth is the sum of scores on
// its root-to-leaf path.
std::vector<double> yngve_depths(const ParseTree& tree);

// Mean leaf depth.
double yngve_sentence_score(const ParseTree& tree);

// word -> non-negative value, with an explicit default for unknown words.
// Lookup tries the exact spelling first, then the lowercased spelling.
class Lexicon {
 public:
  Lexicon(std::unordered_map<std::string, double> values, double oov_default);

  // Corpus counts; unknown words count 0.
  static Lexicon frequencies(std::unordered_map<std::string, double> counts);
  // Sense inventories; unknown words have 1 sense.
  static Lexicon senses(std::unordered_map<std::string, double> counts);

  double lookup(std::string_view word) const;
  bool contains(std::string_view word) const;
  double oov_default() const { return oov_default_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::unordered_map<std::string, double> values_;
  double oov_default_;
};

// Mean of ln(count + 1) over the words.
double avg_log_frequency(std::span<const std::string> words, const Lexicon& lexicon);

// Mean sense count over the words.
double avg_senses(std::span<const std::string> words, const Lexicon& lexicon);

std::vector<std::string> strip_punctuation(std::span<const std::string> words);

// ---- file formats ------------------------------------------------------------

// TSV "word<TAB>value".
std::unordered_map<std::string, double> read_lexicon_values(const std::filesystem::path& path);

struct IdentifiedTree {
  std::string id;
  ParseTree tree;
};

// One bracketed tree per line, optionally prefixed by "<id><TAB>". Lines
// without an id are named by their 1-based line number.
std::vector<IdentifiedTree> read_trees(const std::filesystem::path& path);

struct Sentence {
  std::string id;
  std::vector<std::string> words;
};

// "<id><TAB>space separated words" per line.
std::vector<Sentence> read_sentences(const std::filesystem::path& path);

}  // namespace rsa
