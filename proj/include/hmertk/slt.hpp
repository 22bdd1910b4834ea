#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmertk/error.hpp"
#include "hmertk/token.hpp"

namespace hmertk::slt {

// Spatial relation of a node to its parent. Baseline neighbours are Right;
// the other four hang off a base symbol and add one level of nesting.
enum class Relation { Right, Above, Below, Sub, Sup };

std::string_view relation_label(Relation r);  // "right", "above", ...

class TreeError : public Error {
 public:
  explicit TreeError(const std::string& what) : Error(what) {}
};

class TreeParseError : public Error {
 public:
  enum class Code { EmptyText, BadIndent, BadRelation, BadSymbol, SourceMismatch };

  TreeParseError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// One visible symbol. Spatial children are kept in canonical order
// (Above, Below, Sub, Sup); baseline neighbours chain via `successor`.
struct Node {
  Token symbol;
  std::optional<Relation> relation;  // nullopt only at the root
  std::vector<std::unique_ptr<Node>> spatial_children;
  std::unique_ptr<Node> successor;  // Relation::Right
};

struct Tree {
  std::unique_ptr<Node> root;
  TokenSequence source;  // the normalized sequence the tree was built from
};

// Parses a normalized, brace-balanced sequence into its symbol layout tree:
// baseline symbols chain left to right; \frac hangs its numerator chain Above
// and denominator chain Below; \sqrt hangs its radicand Above (and an
// optional "[ index ]" Below); ^/_ groups become Sup/Sub children of the
// preceding baseline symbol. Braces, brackets and script markers are consumed
// structurally. Throws TreeError on a script marker with no preceding base.
Tree build(const TokenSequence& seq);

// One "SYMBOL (relation)" line per node in depth-first order (spatial
// children before the baseline successor), one TAB per spatial depth, then
// the space-joined source expression as the final line.
std::string serialize(const Tree& tree);

// Inverse of serialize. Accepts runs of four spaces as one indent level.
// Throws TreeParseError: BadIndent on depth jumps, BadRelation on unknown
// labels (or a relation on the root line), BadSymbol on non-symbol tokens,
// SourceMismatch when the trailing expression disagrees with the tree.
Tree parse(std::string_view text);

bool structurally_equal(const Tree& a, const Tree& b);

// Maximum number of Above/Below/Sub/Sup edges on any root-to-node path.
// 0 for purely baseline expressions.
std::size_t complexity(const Tree& tree);

struct SymbolCount {
  std::string symbol;
  std::size_t count;

  bool operator==(const SymbolCount&) const = default;
};

struct SymbolHistogram {
  std::vector<SymbolCount> entries;  // first-occurrence order

  // "|: 2, \frac: 1, a: 2" rendering.
  std::string to_string() const;
};

// Counts every token except braces and brackets, in first-occurrence order.
// Script markers count as visible symbols.
SymbolHistogram count_symbols(const TokenSequence& seq);

// Largest count in count_symbols(seq); 0 for an empty sequence.
std::size_t max_repetition(const TokenSequence& seq);

}  // namespace hmertk::slt
