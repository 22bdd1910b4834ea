#include "hmertk/normalize.hpp"

#include <algorithm>

#include "group_tree.hpp"

namespace hmertk {

namespace {

using detail::GroupNode;
using detail::is_leaf_marker;
using detail::is_leaf_word;

std::vector<GroupNode> parse_or_throw(const TokenSequence& seq) {
  auto tree = detail::parse_group_tree(seq);
  if (!tree) {
    throw NormalizeError(NormalizeError::Code::UnbalancedBraces,
                         "normalize input has unbalanced braces");
  }
  return std::move(*tree);
}

// Pass 2: unwrap style macros, bottom-up, to fixpoint at each level.
// "\textbf { a b }" splices to "a b"; "\textbf a" drops the macro.
void strip_styles(std::vector<GroupNode>& nodes, const NormalizationConfig& cfg) {
  for (GroupNode& n : nodes) {
    if (n.is_group) strip_styles(n.children, cfg);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const GroupNode& n = nodes[i];
      if (n.is_group || n.token.kind != TokenKind::ControlWord ||
          !cfg.strip_styles.count(n.token.text)) {
        continue;
      }
      if (i + 1 < nodes.size() && nodes[i + 1].is_group) {
        std::vector<GroupNode> contents = std::move(nodes[i + 1].children);
        nodes.erase(nodes.begin() + static_cast<long>(i),
                    nodes.begin() + static_cast<long>(i) + 2);
        nodes.insert(nodes.begin() + static_cast<long>(i),
                     std::make_move_iterator(contents.begin()),
                     std::make_move_iterator(contents.end()));
      } else {
        nodes.erase(nodes.begin() + static_cast<long>(i));
      }
      changed = true;
      break;
    }
  }
}

// Pass 3a: every bare argument of ^ and _ becomes a braced group.
void brace_scripts(std::vector<GroupNode>& nodes) {
  for (GroupNode& n : nodes) {
    if (n.is_group) brace_scripts(n.children);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!is_leaf_marker(nodes[i])) continue;
    if (i + 1 >= nodes.size()) {
      throw NormalizeError(NormalizeError::Code::MalformedScript,
                           "script marker '" + nodes[i].token.text +
                               "' has no argument");
    }
    GroupNode& arg = nodes[i + 1];
    if (!arg.is_group) {
      if (is_script_marker(arg.token)) {
        throw NormalizeError(NormalizeError::Code::MalformedScript,
                             "script marker argument is another script marker");
      }
      arg = GroupNode::group({GroupNode::leaf(arg.token)});
    }
    ++i;  // skip the argument
  }
}

// Consumes one \frac argument starting at `pos`: either an existing group, or
// a single bare token together with its already-braced script groups.
// Returns the index one past the (now braced) argument.
std::size_t brace_frac_argument(std::vector<GroupNode>& nodes, std::size_t pos) {
  if (pos >= nodes.size()) {
    throw NormalizeError(NormalizeError::Code::MissingArgument,
                         "\\frac lacks an argument");
  }
  if (nodes[pos].is_group) return pos + 1;
  if (is_leaf_marker(nodes[pos])) {
    throw NormalizeError(NormalizeError::Code::MissingArgument,
                         "\\frac argument starts with a script marker");
  }
  std::size_t end = pos + 1;
  while (end + 1 < nodes.size() && is_leaf_marker(nodes[end]) &&
         nodes[end + 1].is_group) {
    end += 2;
  }
  std::vector<GroupNode> unit(
      std::make_move_iterator(nodes.begin() + static_cast<long>(pos)),
      std::make_move_iterator(nodes.begin() + static_cast<long>(end)));
  nodes.erase(nodes.begin() + static_cast<long>(pos),
              nodes.begin() + static_cast<long>(end));
  nodes.insert(nodes.begin() + static_cast<long>(pos),
               GroupNode::group(std::move(unit)));
  return pos + 1;
}

// Pass 3b + 4: brace \frac arguments and \sqrt radicands, keeping the \sqrt
// optional "[ index ]" in place.
void brace_arguments(std::vector<GroupNode>& nodes) {
  for (GroupNode& n : nodes) {
    if (n.is_group) brace_arguments(n.children);
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (is_leaf_word(nodes[i], "\\frac")) {
      std::size_t next = brace_frac_argument(nodes, i + 1);
      brace_frac_argument(nodes, next);
      continue;
    }
    if (is_leaf_word(nodes[i], "\\sqrt")) {
      std::size_t j = i + 1;
      if (j < nodes.size() && !nodes[j].is_group &&
          nodes[j].token.kind == TokenKind::OpenBracket) {
        int depth = 0;
        std::size_t k = j;
        for (; k < nodes.size(); ++k) {
          if (nodes[k].is_group) continue;
          if (nodes[k].token.kind == TokenKind::OpenBracket) ++depth;
          if (nodes[k].token.kind == TokenKind::CloseBracket && --depth == 0)
            break;
        }
        if (k == nodes.size()) {
          throw NormalizeError(NormalizeError::Code::MissingArgument,
                               "\\sqrt index '[' is unterminated");
        }
        j = k + 1;
      }
      if (j >= nodes.size()) {
        throw NormalizeError(NormalizeError::Code::MissingArgument,
                             "\\sqrt lacks a radicand");
      }
      if (!nodes[j].is_group) {
        if (is_leaf_marker(nodes[j])) {
          throw NormalizeError(NormalizeError::Code::MissingArgument,
                               "\\sqrt radicand is a script marker");
        }
        nodes[j] = GroupNode::group({GroupNode::leaf(nodes[j].token)});
      }
      continue;
    }
  }
}

// Pass 5: "base ^ { B } _ { A }" -> "base _ { A } ^ { B }".
void reorder_sub_sup(std::vector<GroupNode>& nodes) {
  for (GroupNode& n : nodes) {
    if (n.is_group) reorder_sub_sup(n.children);
  }
  for (std::size_t i = 1; i + 3 < nodes.size(); ++i) {
    bool base_ok = !is_leaf_marker(nodes[i - 1]);
    if (base_ok && !nodes[i].is_group &&
        nodes[i].token.kind == TokenKind::Superscript && nodes[i + 1].is_group &&
        !nodes[i + 2].is_group && nodes[i + 2].token.kind == TokenKind::Subscript &&
        nodes[i + 3].is_group) {
      std::swap(nodes[i], nodes[i + 2]);
      std::swap(nodes[i + 1], nodes[i + 3]);
      i += 3;
    }
  }
}

}  // namespace

NormalizationConfig NormalizationConfig::defaults() {
  NormalizationConfig cfg;
  cfg.alias_map = {{"\\le", "\\leq"}, {"\\ge", "\\geq"}, {"\\ne", "\\neq"}};
  cfg.strip_styles = {"\\textbf", "\\textit", "\\mathrm", "\\text", "\\mathbf"};
  cfg.remove_tokens = {{control_word("\\underline"), open_brace(),
                        control_word("\\quad"), close_brace()}};
  return cfg;
}

void NormalizationConfig::validate_aliases() const {
  for (const auto& [from, to] : alias_map) {
    if (from == to) {
      throw ConfigError("alias maps to itself: " + from);
    }
    if (alias_map.count(to)) {
      throw ConfigError("alias chain longer than 1: " + from + " -> " + to);
    }
  }
}

TokenSequence clean(const TokenSequence& seq, const NormalizationConfig& cfg) {
  TokenSequence cur = seq;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const TokenSequence& pattern : cfg.remove_tokens) {
      if (pattern.empty() || pattern.size() > cur.size()) continue;
      auto it = std::search(cur.begin(), cur.end(), pattern.begin(), pattern.end());
      if (it != cur.end()) {
        cur.erase(it, it + static_cast<long>(pattern.size()));
        changed = true;
      }
    }
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      if (cur[i].kind == TokenKind::OpenBrace &&
          cur[i + 1].kind == TokenKind::CloseBrace) {
        cur.erase(cur.begin() + static_cast<long>(i),
                  cur.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
    }
  }
  return cur;
}

TokenSequence normalize(const TokenSequence& seq, const NormalizationConfig& cfg) {
  TokenSequence aliased = seq;
  for (Token& t : aliased) {
    if (t.kind == TokenKind::ControlWord) {
      auto it = cfg.alias_map.find(t.text);
      if (it != cfg.alias_map.end()) t.text = it->second;
    }
  }
  std::vector<GroupNode> tree = parse_or_throw(aliased);
  strip_styles(tree, cfg);
  brace_scripts(tree);
  brace_arguments(tree);
  reorder_sub_sup(tree);
  TokenSequence out;
  out.reserve(seq.size());
  detail::flatten_group_tree(tree, out);
  return out;
}

}  // namespace hmertk
