#include "rsa/lingfeat.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "rsa/error.hpp"
#include "rsa/io.hpp"

namespace rsa {

std::vector<double> yngve_depths(const ParseTree& tree) {
  const auto& nodes = tree.nodes();
  std::vector<double> depths;
  // (node, accumulated score including the node's own)
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, score] = stack.back();
    stack.pop_back();
    const auto& node = nodes[id];
    if (node.leaf) {
      depths.push_back(static_cast<double>(score));
      continue;
    }
    const std::size_t k = node.children.size();
    // Push right to left so leaves come out in sentence order.
    for (std::size_t c = k; c-- > 0;) stack.emplace_back(node.children[c], score + (k - 1 - c));
  }
  return depths;
}

double yngve_sentence_score(const ParseTree& tree) {
  const auto depths = yngve_depths(tree);
  if (depths.empty()) throw ValidationError("leaf-less tree");
  double sum = 0.0;
  for (double d : depths) sum += d;
  return sum / static_cast<double>(depths.size());
}

Lexicon::Lexicon(std::unordered_map<std::string, double> values, double oov_default)
    : values_(std::move(values)), oov_default_(oov_default) {
  if (!(oov_default_ >= 0.0) || !std::isfinite(oov_default_)) {
    throw ValidationError("lexicon default must be finite and >= 0");
  }
  for (const auto& [word, value] : values_) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw ValidationError(fmt::format("lexicon value for '{}' must be finite and >= 0", word));
    }
  }
}

Lexicon Lexicon::frequencies(std::unordered_map<std::string, double> counts) {
  return Lexicon(std::move(counts), 0.0);
}

Lexicon Lexicon::senses(std::unordered_map<std::string, double> counts) {
  return Lexicon(std::move(counts), 1.0);
}

namespace {

std::string lowercase(std::string_view word) {
  std::string out(word);
  std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void require_words(std::span<const std::string> words) {
  if (words.empty()) throw ValidationError("empty sentence");
}

}  // namespace

double Lexicon::lookup(std::string_view word) const {
  if (auto it = values_.find(std::string(word)); it != values_.end()) return it->second;
  if (auto it = values_.find(lowercase(word)); it != values_.end()) return it->second;
  return oov_default_;
}

bool Lexicon::contains(std::string_view word) const {
  return values_.contains(std::string(word)) || values_.contains(lowercase(word));
}

double avg_log_frequency(std::span<const std::string> words, const Lexicon& lexicon) {
  require_words(words);
  double sum = 0.0;
  for (const auto& word : words) sum += std::log1p(lexicon.lookup(word));
  return sum / static_cast<double>(words.size());
}

double avg_senses(std::span<const std::string> words, const Lexicon& lexicon) {
  require_words(words);
  double sum = 0.0;
  for (const auto& word : words) sum += lexicon.lookup(word);
  return sum / static_cast<double>(words.size());
}

std::vector<std::string> strip_punctuation(std::span<const std::string> words) {
  std::vector<std::string> out;
  for (const auto& word : words) {
    if (!is_punctuation(word)) out.push_back(word);
  }
  return out;
}

std::unordered_map<std::string, double> read_lexicon_values(const std::filesystem::path& path) {
  std::unordered_map<std::string, double> values;
  const auto lines = io::read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (io::trim(lines[n]).empty()) continue;
    const auto tab = lines[n].find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(fmt::format("{}:{}: expected word<TAB>value", path.string(), n + 1));
    }
    const std::string word = lines[n].substr(0, tab);
    const double value = io::parse_double(std::string_view(lines[n]).substr(tab + 1), "lexicon value");
    if (!values.emplace(word, value).second) {
      throw ValidationError(fmt::format("{}:{}: duplicate word '{}'", path.string(), n + 1, word));
    }
  }
  return values;
}

std::vector<IdentifiedTree> read_trees(const std::filesystem::path& path) {
  std::vector<IdentifiedTree> trees;
  const auto lines = io::read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (io::trim(lines[n]).empty()) continue;
    std::string id = std::to_string(n + 1);
    std::string_view body = lines[n];
    if (const auto tab = body.find('\t'); tab != std::string_view::npos) {
      id = io::trim(body.substr(0, tab));
      body = body.substr(tab + 1);
    }
    try {
      trees.push_back(IdentifiedTree{std::move(id), parse_bracketed(body)});
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("{}:{}: {}", path.string(), n + 1, e.what()));
    }
  }
  return trees;
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  std::vector<Sentence> sentences;
  const auto lines = io::read_lines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (io::trim(lines[n]).empty()) continue;
    const auto tab = lines[n].find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(fmt::format("{}:{}: expected id<TAB>words", path.string(), n + 1));
    }
    Sentence sentence{io::trim(std::string_view(lines[n]).substr(0, tab)), {}};
    std::istringstream words(lines[n].substr(tab + 1));
    for (std::string w; words >> w;) sentence.words.push_back(w);
    sentences.push_back(std::move(sentence));
  }
  return sentences;
}

}  // namespace rsa
