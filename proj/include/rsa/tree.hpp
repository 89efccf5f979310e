#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rsa {

// Ordered rooted tree from a Penn-style bracketed string. Internal nodes
// carry a (possibly empty) category label; leaves carry words. Node 0 is the
// root.
class ParseTree {
 public:
  struct Node {
    std::string text;  // category label, or the word for a leaf
    bool leaf = false;
    std::vector<std::size_t> children;
  };

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& root() const { return nodes_.front(); }

  // Leaf node indices, left to right.
  std::vector<std::size_t> leaves() const;
  std::vector<std::string> words() const;

  // Single-line bracketed form; parse(to_string()) reproduces the tree.
  std::string to_string() const;

  // Removes leaves made only of punctuation characters and any internal
  // node left without children. Throws if nothing remains.
  ParseTree without_punctuation() const;

  friend bool operator==(const ParseTree&, const ParseTree&);

 private:
  friend ParseTree parse_bracketed(std::string_view text);
  friend class TreeBuilder;
  std::vector<Node> nodes_;
};

// Errors carry the byte offset of the problem: unbalanced parentheses,
// empty node "()" or "(X)", trailing input, or an empty (leaf-less) input.
ParseTree parse_bracketed(std::string_view text);

// Programmatic construction, mainly for generators and tests.
class TreeBuilder {
 public:
  // Returns the new node's index; parent is ignored for the first node.
  std::size_t add_internal(std::size_t parent, std::string label);
  std::size_t add_leaf(std::size_t parent, std::string word);
  // Validates (every internal node has a child) and hands over the tree.
  ParseTree build() &&;

 private:
  std::size_t add(std::size_t parent, ParseTree::Node node);
  ParseTree tree_;
};

bool is_punctuation(std::string_view word);

}  // namespace rsa
