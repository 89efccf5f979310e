#include "rsa/tree.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include <fmt/format.h>

#include "rsa/error.hpp"

namespace rsa {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_atom_char(char c) { return !is_space(c) && c != '(' && c != ')'; }

}  // namespace

std::vector<std::size_t> ParseTree::leaves() const {
  std::vector<std::size_t> out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (node.leaf) {
      out.push_back(id);
      continue;
    }
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<std::string> ParseTree::words() const {
  std::vector<std::string> out;
  for (std::size_t id : leaves()) out.push_back(nodes_[id].text);
  return out;
}

std::string ParseTree::to_string() const {
  std::string out;
  // (node, next child) frames; a leaf is emitted inline by its parent
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  out += '(';
  out += nodes_[0].text;
  while (!stack.empty()) {
    auto& [id, next] = stack.back();
    const Node& node = nodes_[id];
    if (next == node.children.size()) {
      out += ')';
      stack.pop_back();
      continue;
    }
    const std::size_t child = node.children[next++];
    out += ' ';
    if (nodes_[child].leaf) {
      out += nodes_[child].text;
    } else {
      out += '(';
      out += nodes_[child].text;
      stack.emplace_back(child, 0);
    }
  }
  return out;
}

ParseTree ParseTree::without_punctuation() const {
  // Post-order: a node survives if it is a non-punctuation leaf or keeps at
  // least one surviving child.
  std::vector<bool> keep(nodes_.size(), false);
  std::vector<std::pair<std::size_t, bool>> stack{{0, false}};
  while (!stack.empty()) {
    auto [id, expanded] = stack.back();
    stack.pop_back();
    const Node& node = nodes_[id];
    if (node.leaf) {
      keep[id] = !is_punctuation(node.text);
    } else if (!expanded) {
      stack.emplace_back(id, true);
      for (std::size_t c : node.children) stack.emplace_back(c, false);
    } else {
      keep[id] = std::ranges::any_of(node.children, [&](std::size_t c) { return keep[c]; });
    }
  }
  if (!keep[0]) throw ValidationError("leaf-less tree after removing punctuation");

  TreeBuilder builder;
  std::vector<std::pair<std::size_t, std::size_t>> work{{0, 0}};  // (old id, new parent)
  while (!work.empty()) {
    auto [old_id, parent] = work.back();
    work.pop_back();
    const Node& node = nodes_[old_id];
    if (node.leaf) {
      builder.add_leaf(parent, node.text);
      continue;
    }
    const std::size_t fresh = builder.add_internal(parent, node.text);
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
      if (keep[*it]) work.emplace_back(*it, fresh);
    }
  }
  return std::move(builder).build();
}

bool operator==(const ParseTree& a, const ParseTree& b) {
  if (a.nodes_.size() != b.nodes_.size()) return false;
  // Structural comparison; node numbering may differ.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [i, j] = stack.back();
    stack.pop_back();
    const auto& x = a.nodes_[i];
    const auto& y = b.nodes_[j];
    if (x.text != y.text || x.leaf != y.leaf || x.children.size() != y.children.size()) return false;
    for (std::size_t k = 0; k < x.children.size(); ++k) stack.emplace_back(x.children[k], y.children[k]);
  }
  return true;
}

std::size_t TreeBuilder::add(std::size_t parent, ParseTree::Node node) {
  const std::size_t id = tree_.nodes_.size();
  if (id > 0) {
    if (parent >= id || tree_.nodes_[parent].leaf) {
      throw ValidationError("tree builder: invalid parent");
    }
    tree_.nodes_[parent].children.push_back(id);
  } else if (node.leaf) {
    throw ValidationError("tree root must be an internal node");
  }
  tree_.nodes_.push_back(std::move(node));
  return id;
}

std::size_t TreeBuilder::add_internal(std::size_t parent, std::string label) {
  return add(parent, ParseTree::Node{std::move(label), false, {}});
}

std::size_t TreeBuilder::add_leaf(std::size_t parent, std::string word) {
  if (word.empty() || !std::ranges::all_of(word, is_atom_char)) {
    throw ValidationError(fmt::format("invalid leaf word '{}'", word));
  }
  return add(parent, ParseTree::Node{std::move(word), true, {}});
}

ParseTree TreeBuilder::build() && {
  if (tree_.nodes_.empty()) throw ValidationError("leaf-less tree");
  for (const auto& node : tree_.nodes_) {
    if (!node.leaf && node.children.empty()) throw ValidationError("empty node");
  }
  return std::move(tree_);
}

ParseTree parse_bracketed(std::string_view text) {
  ParseTree tree;
  auto& nodes = tree.nodes_;
  std::vector<std::pair<std::size_t, std::size_t>> open;  // (node, offset of '(')
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < text.size() && is_space(text[pos])) ++pos;
  };
  auto read_atom = [&] {
    const std::size_t start = pos;
    while (pos < text.size() && is_atom_char(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  };

  skip_space();
  if (pos == text.size()) throw ValidationError("leaf-less tree: empty input");
  if (text[pos] != '(') throw ValidationError(fmt::format("expected '(' at offset {}", pos));

  while (true) {
    skip_space();
    if (pos == text.size()) {
      throw ValidationError(fmt::format("unbalanced parentheses: missing ')' at offset {}", pos));
    }
    const char c = text[pos];
    if (c == '(') {
      const std::size_t start = pos++;
      skip_space();
      std::string label = (pos < text.size() && is_atom_char(text[pos])) ? read_atom() : std::string{};
      const std::size_t id = nodes.size();
      if (!open.empty()) nodes[open.back().first].children.push_back(id);
      nodes.push_back(ParseTree::Node{std::move(label), false, {}});
      open.emplace_back(id, start);
    } else if (c == ')') {
      if (open.empty()) throw ValidationError(fmt::format("unbalanced parentheses at offset {}", pos));
      const auto [id, start] = open.back();
      if (nodes[id].children.empty()) throw ValidationError(fmt::format("empty node at offset {}", start));
      open.pop_back();
      ++pos;
      if (open.empty()) break;
    } else {
      if (open.empty()) throw ValidationError(fmt::format("unbalanced parentheses at offset {}", pos));
      const std::size_t id = nodes.size();
      nodes[open.back().first].children.push_back(id);
      nodes.push_back(ParseTree::Node{read_atom(), true, {}});
    }
  }
  skip_space();
  if (pos != text.size()) throw ValidationError(fmt::format("trailing input at offset {}", pos));
  return tree;
}

bool is_punctuation(std::string_view word) {
  return !word.empty() &&
         std::ranges::all_of(word, [](char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace rsa
