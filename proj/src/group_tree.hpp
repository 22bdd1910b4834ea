#pragma once

#include <optional>
#include <vector>

#include "hmertk/token.hpp"

namespace hmertk::detail {

// Brace-group view of a token sequence: a balanced { ... } becomes one node,
// everything else (including brackets) stays a leaf.
struct GroupNode {
  Token token;  // meaningful iff !is_group
  bool is_group = false;
  std::vector<GroupNode> children;

  static GroupNode leaf(Token t) { return {std::move(t), false, {}}; }
  static GroupNode group(std::vector<GroupNode> ch) {
    return {Token{}, true, std::move(ch)};
  }
};

// Returns nullopt when braces are unbalanced.
inline std::optional<std::vector<GroupNode>> parse_group_tree(
    const TokenSequence& seq) {
  std::vector<std::vector<GroupNode>> stack;
  stack.emplace_back();
  for (const Token& t : seq) {
    if (t.kind == TokenKind::OpenBrace) {
      stack.emplace_back();
    } else if (t.kind == TokenKind::CloseBrace) {
      if (stack.size() == 1) return std::nullopt;
      GroupNode g = GroupNode::group(std::move(stack.back()));
      stack.pop_back();
      stack.back().push_back(std::move(g));
    } else {
      stack.back().push_back(GroupNode::leaf(t));
    }
  }
  if (stack.size() != 1) return std::nullopt;
  return std::move(stack.front());
}

inline void flatten_group_tree(const std::vector<GroupNode>& nodes,
                               TokenSequence& out) {
  for (const GroupNode& n : nodes) {
    if (n.is_group) {
      out.push_back(open_brace());
      flatten_group_tree(n.children, out);
      out.push_back(close_brace());
    } else {
      out.push_back(n.token);
    }
  }
}

inline bool is_leaf_marker(const GroupNode& n) {
  return !n.is_group && is_script_marker(n.token);
}

inline bool is_leaf_word(const GroupNode& n, std::string_view word) {
  return !n.is_group && n.token.kind == TokenKind::ControlWord &&
         n.token.text == word;
}

}  // namespace hmertk::detail
