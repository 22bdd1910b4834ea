#include "hmertk/slt.hpp"

#include <algorithm>
#include <map>
#include <span>

#include "group_tree.hpp"
#include "hmertk/tokenizer.hpp"

namespace hmertk::slt {

namespace {

using detail::GroupNode;
using detail::is_leaf_marker;
using detail::is_leaf_word;

int relation_order(Relation r) {
  switch (r) {
    case Relation::Above: return 0;
    case Relation::Below: return 1;
    case Relation::Sub: return 2;
    case Relation::Sup: return 3;
    case Relation::Right: return 4;  // never a spatial child
  }
  return 4;
}

// Keeps spatial_children in canonical Above, Below, Sub, Sup order.
void add_spatial_child(Node& parent, std::unique_ptr<Node> child) {
  Relation r = *child->relation;
  auto pos = std::find_if(parent.spatial_children.begin(),
                          parent.spatial_children.end(),
                          [&](const std::unique_ptr<Node>& c) {
                            return relation_order(*c->relation) > relation_order(r);
                          });
  parent.spatial_children.insert(pos, std::move(child));
}

struct Chain {
  std::unique_ptr<Node> head;
  Node* tail = nullptr;
};

Chain build_chain(std::span<const GroupNode> nodes, std::optional<Relation> head_relation);

// Builds the chain for one argument element (a group or a bare token) and
// hangs it off `parent` with the given relation. Skips empty groups.
void attach_argument(Node& parent, const GroupNode& arg, Relation relation) {
  Chain chain;
  if (arg.is_group) {
    chain = build_chain(arg.children, relation);
  } else {
    chain = build_chain(std::span<const GroupNode>(&arg, 1), relation);
  }
  if (chain.head) add_spatial_child(parent, std::move(chain.head));
}

Chain build_chain(std::span<const GroupNode> nodes,
                  std::optional<Relation> head_relation) {
  Chain chain;
  auto link = [&](std::unique_ptr<Node> node) {
    Node* raw = node.get();
    if (!chain.head) {
      node->relation = head_relation;
      chain.head = std::move(node);
    } else {
      node->relation = Relation::Right;
      chain.tail->successor = std::move(node);
    }
    chain.tail = raw;
  };

  std::size_t i = 0;
  while (i < nodes.size()) {
    const GroupNode& cur = nodes[i];

    if (cur.is_group) {
      // Baseline brace group: splice its chain in; trailing scripts attach
      // to the spliced chain's tail.
      Chain inner = build_chain(cur.children, head_relation);
      if (inner.head) {
        if (!chain.head) {
          chain.head = std::move(inner.head);
        } else {
          inner.head->relation = Relation::Right;
          chain.tail->successor = std::move(inner.head);
        }
        chain.tail = inner.tail;
      }
      ++i;
      continue;
    }

    const Token& tok = cur.token;

    if (is_script_marker(tok)) {
      if (!chain.tail) {
        throw TreeError("script marker '" + tok.text + "' has no preceding base");
      }
      if (i + 1 >= nodes.size()) {
        throw TreeError("script marker '" + tok.text + "' has no argument");
      }
      Relation r = tok.kind == TokenKind::Superscript ? Relation::Sup
                                                      : Relation::Sub;
      attach_argument(*chain.tail, nodes[i + 1], r);
      i += 2;
      continue;
    }

    if (is_bracket(tok)) {
      // Bare brackets are structural-only; their contents stay on the
      // baseline. (\sqrt-attached index brackets are consumed below.)
      ++i;
      continue;
    }

    if (tok.kind == TokenKind::ControlWord && tok.text == "\\frac") {
      auto node = std::make_unique<Node>();
      node->symbol = tok;
      if (i + 2 >= nodes.size()) {
        throw TreeError("\\frac lacks two arguments");
      }
      attach_argument(*node, nodes[i + 1], Relation::Above);
      attach_argument(*node, nodes[i + 2], Relation::Below);
      link(std::move(node));
      i += 3;
      continue;
    }

    if (tok.kind == TokenKind::ControlWord && tok.text == "\\sqrt") {
      auto node = std::make_unique<Node>();
      node->symbol = tok;
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
          throw TreeError("\\sqrt index '[' is unterminated");
        }
        Chain index = build_chain(nodes.subspan(j + 1, k - j - 1), Relation::Below);
        if (index.head) add_spatial_child(*node, std::move(index.head));
        j = k + 1;
      }
      if (j >= nodes.size()) {
        throw TreeError("\\sqrt lacks a radicand");
      }
      attach_argument(*node, nodes[j], Relation::Above);
      link(std::move(node));
      i = j + 1;
      continue;
    }

    auto node = std::make_unique<Node>();
    node->symbol = tok;
    link(std::move(node));
    ++i;
  }
  return chain;
}

void serialize_node(const Node& node, std::size_t depth, std::string& out) {
  out.append(depth, '\t');
  out += node.symbol.text;
  if (node.relation) {
    out += " (";
    out += relation_label(*node.relation);
    out += ")";
  }
  out += "\n";
  for (const auto& child : node.spatial_children) {
    serialize_node(*child, depth + 1, out);
  }
  if (node.successor) {
    serialize_node(*node.successor, depth, out);
  }
}

std::size_t node_depth_max(const Node& node, std::size_t depth) {
  std::size_t best = depth;
  for (const auto& child : node.spatial_children) {
    best = std::max(best, node_depth_max(*child, depth + 1));
  }
  if (node.successor) {
    best = std::max(best, node_depth_max(*node.successor, depth));
  }
  return best;
}

bool nodes_equal(const Node* a, const Node* b) {
  if (!a || !b) return a == b;
  if (a->symbol != b->symbol || a->relation != b->relation) return false;
  if (a->spatial_children.size() != b->spatial_children.size()) return false;
  for (std::size_t i = 0; i < a->spatial_children.size(); ++i) {
    if (!nodes_equal(a->spatial_children[i].get(), b->spatial_children[i].get()))
      return false;
  }
  return nodes_equal(a->successor.get(), b->successor.get());
}

void collect_node_symbols(const Node& node, std::vector<std::string>& out) {
  out.push_back(node.symbol.text);
  for (const auto& child : node.spatial_children) {
    collect_node_symbols(*child, out);
  }
  if (node.successor) collect_node_symbols(*node.successor, out);
}

std::optional<Relation> relation_from_label(std::string_view label) {
  if (label == "right") return Relation::Right;
  if (label == "above") return Relation::Above;
  if (label == "below") return Relation::Below;
  if (label == "sub") return Relation::Sub;
  if (label == "sup") return Relation::Sup;
  return std::nullopt;
}

}  // namespace

std::string_view relation_label(Relation r) {
  switch (r) {
    case Relation::Right: return "right";
    case Relation::Above: return "above";
    case Relation::Below: return "below";
    case Relation::Sub: return "sub";
    case Relation::Sup: return "sup";
  }
  return "right";
}

Tree build(const TokenSequence& seq) {
  if (seq.empty()) {
    throw TreeError("cannot build a layout tree from an empty sequence");
  }
  auto groups = detail::parse_group_tree(seq);
  if (!groups) {
    throw TreeError("layout tree input has unbalanced braces");
  }
  Chain chain = build_chain(*groups, std::nullopt);
  if (!chain.head) {
    throw TreeError("expression has no visible symbols");
  }
  return Tree{std::move(chain.head), seq};
}

std::string serialize(const Tree& tree) {
  std::string out;
  serialize_node(*tree.root, 0, out);
  out += detokenize(tree.source);
  return out;
}

Tree parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) {
    throw TreeParseError(TreeParseError::Code::EmptyText,
                         "tree text needs at least one node line and the "
                         "expression line");
  }

  std::string_view source_line = lines.back();
  lines.pop_back();

  Tree tree;
  std::vector<Node*> tails;  // last node seen per depth

  for (std::size_t lineno = 0; lineno < lines.size(); ++lineno) {
    std::string_view line = lines[lineno];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t depth = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] == '\t') {
        ++depth;
        ++pos;
      } else if (line.substr(pos, 4) == "    ") {
        ++depth;
        pos += 4;
      } else {
        break;
      }
    }
    std::string_view rest = line.substr(pos);
    if (rest.empty() || rest.front() == ' ') {
      throw TreeParseError(TreeParseError::Code::BadIndent,
                           "line " + std::to_string(lineno + 1) +
                               ": indentation is not TABs or 4-space runs");
    }

    std::string_view symbol_text = rest;
    std::optional<Relation> relation;
    if (rest.size() >= 4 && rest.back() == ')') {
      std::size_t open = rest.rfind(" (");
      if (open != std::string_view::npos) {
        std::string_view label = rest.substr(open + 2, rest.size() - open - 3);
        relation = relation_from_label(label);
        if (!relation) {
          throw TreeParseError(TreeParseError::Code::BadRelation,
                               "line " + std::to_string(lineno + 1) +
                                   ": unknown relation '" + std::string(label) +
                                   "'");
        }
        symbol_text = rest.substr(0, open);
      }
    }

    TokenSequence symbol_tokens;
    try {
      symbol_tokens = tokenize(symbol_text);
    } catch (const TokenizeError&) {
      throw TreeParseError(TreeParseError::Code::BadSymbol,
                           "line " + std::to_string(lineno + 1) +
                               ": unparseable symbol '" +
                               std::string(symbol_text) + "'");
    }
    if (symbol_tokens.size() != 1 || is_brace(symbol_tokens[0]) ||
        is_bracket(symbol_tokens[0]) || is_script_marker(symbol_tokens[0])) {
      throw TreeParseError(TreeParseError::Code::BadSymbol,
                           "line " + std::to_string(lineno + 1) +
                               ": '" + std::string(symbol_text) +
                               "' is not a node symbol");
    }

    auto node = std::make_unique<Node>();
    node->symbol = symbol_tokens[0];
    node->relation = relation;

    if (lineno == 0) {
      if (depth != 0) {
        throw TreeParseError(TreeParseError::Code::BadIndent,
                             "root line must not be indented");
      }
      if (relation) {
        throw TreeParseError(TreeParseError::Code::BadRelation,
                             "root line must not carry a relation");
      }
      tree.root = std::move(node);
      tails.assign(1, tree.root.get());
      continue;
    }

    if (!relation) {
      throw TreeParseError(TreeParseError::Code::BadRelation,
                           "line " + std::to_string(lineno + 1) +
                               ": missing relation");
    }
    Node* raw = node.get();
    if (*relation == Relation::Right) {
      if (depth >= tails.size()) {
        throw TreeParseError(TreeParseError::Code::BadIndent,
                             "line " + std::to_string(lineno + 1) +
                                 ": no baseline to continue at this depth");
      }
      tails[depth]->successor = std::move(node);
    } else {
      if (depth == 0 || depth > tails.size()) {
        throw TreeParseError(TreeParseError::Code::BadIndent,
                             "line " + std::to_string(lineno + 1) +
                                 ": depth exceeds parent depth + 1");
      }
      tails[depth - 1]->spatial_children.push_back(std::move(node));
    }
    tails.resize(depth + 1);
    tails[depth] = raw;
  }

  try {
    tree.source = tokenize(source_line);
  } catch (const TokenizeError& e) {
    throw TreeParseError(TreeParseError::Code::SourceMismatch,
                         std::string("expression line does not tokenize: ") +
                             e.what());
  }

  std::vector<std::string> tree_symbols;
  collect_node_symbols(*tree.root, tree_symbols);
  std::vector<std::string> source_symbols;
  for (const Token& t : tree.source) {
    if (is_brace(t) || is_bracket(t) || is_script_marker(t)) continue;
    source_symbols.push_back(t.text);
  }
  std::sort(tree_symbols.begin(), tree_symbols.end());
  std::sort(source_symbols.begin(), source_symbols.end());
  if (tree_symbols != source_symbols) {
    throw TreeParseError(TreeParseError::Code::SourceMismatch,
                         "expression line symbols disagree with the tree");
  }
  return tree;
}

bool structurally_equal(const Tree& a, const Tree& b) {
  return a.source == b.source && nodes_equal(a.root.get(), b.root.get());
}

std::size_t complexity(const Tree& tree) {
  return node_depth_max(*tree.root, 0);
}

std::string SymbolHistogram::to_string() const {
  std::string out;
  for (const SymbolCount& e : entries) {
    if (!out.empty()) out += ", ";
    out += e.symbol;
    out += ": ";
    out += std::to_string(e.count);
  }
  return out;
}

SymbolHistogram count_symbols(const TokenSequence& seq) {
  SymbolHistogram hist;
  std::map<std::string, std::size_t> index;
  for (const Token& t : seq) {
    if (is_brace(t) || is_bracket(t)) continue;
    auto [it, inserted] = index.try_emplace(t.text, hist.entries.size());
    if (inserted) {
      hist.entries.push_back({t.text, 1});
    } else {
      ++hist.entries[it->second].count;
    }
  }
  return hist;
}

std::size_t max_repetition(const TokenSequence& seq) {
  std::size_t best = 0;
  for (const SymbolCount& e : count_symbols(seq).entries) {
    best = std::max(best, e.count);
  }
  return best;
}

}  // namespace hmertk::slt
