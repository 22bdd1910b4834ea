#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hmertk/error.hpp"
#include "hmertk/token.hpp"

namespace hmertk::editops {

inline constexpr std::string_view kErrorStartTag = "<error_start>";
inline constexpr std::string_view kErrorEndTag = "<error_end>";
inline constexpr std::string_view kDeletedTag = "<deleted>";

class EditError : public Error {
 public:
  enum class Code { SpanMismatch, NoErrors, NothingToCorrupt, ReservedTag };

  EditError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // half-open

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  bool operator==(const Span&) const = default;
};

enum class OpKind { Match, Replace, Insert, Delete };

struct EditOp {
  OpKind kind;
  Span pred;  // empty for Insert (an insertion point)
  Span gt;    // empty for Delete

  bool operator==(const EditOp&) const = default;
};

// Minimal-cost token alignment. Spans tile both sequences in order; adjacent
// same-kind ops are merged.
struct EditScript {
  std::vector<EditOp> ops;

  // Replace + Insert + Delete token count == token-level Levenshtein distance.
  std::size_t cost() const;
};

// Unit-cost Levenshtein alignment with a deterministic forward backtrace:
// ties resolve leftmost-first with preference Match > Replace > Delete >
// Insert. Throws EditError::ReservedTag if either side contains one of the
// literal markup tags as a token.
EditScript align(const TokenSequence& pred, const TokenSequence& gt);

// Executes the script against pred (Match/Delete read pred, Replace/Insert
// read gt). Throws EditError::SpanMismatch if the spans do not tile the
// sequences. align's post-condition: apply(align(p, g), p, g) == g.
TokenSequence apply(const EditScript& script, const TokenSequence& pred,
                    const TokenSequence& gt);

// A maximal run of adjacent non-Match ops, merged into one region.
struct ErrorSpan {
  Span pred;
  Span gt;
};

std::vector<ErrorSpan> error_spans(const EditScript& script);

// The prediction with every error region wrapped in
// "<error_start> ... <error_end>" and every pure insertion point rendered as
// a standalone "<deleted>" token. Stripping the three tags recovers the
// prediction exactly.
struct MarkedExpression {
  std::string text;
};

MarkedExpression mark_errors(const TokenSequence& pred, const EditScript& script);

// Removes the three markup tags from a marked string (inverse of mark_errors,
// back to the space-joined prediction).
std::string strip_markup(std::string_view marked);

// One single-error fix: the expression with exactly this error present and
// tagged, the fix as a log line, and the sequence after the fix (the ground
// truth, since every other error is already fixed in the base text).
struct CorrectionRound {
  MarkedExpression marked;
  std::string log_line;  // "REPLACE:OLD -> NEW" | "INSERT:CONTENT" | "DELETE:CONTENT"
  TokenSequence corrected;
};

// One round per error span of align(pred, gt), left to right. Throws
// EditError::NoErrors when pred == gt.
std::vector<CorrectionRound> correction_rounds(const TokenSequence& pred,
                                               const TokenSequence& gt);

// Seeded synthetic corruption for building error corpora without model
// predictions.
struct InjectionConfig {
  // Bidirectional visually-confusable pairs; substitution prefers these.
  std::vector<std::pair<std::string, std::string>> confusion_pairs;
  double p_substitute = 0.6;
  double p_delete = 0.2;
  double p_insert = 0.2;
  std::size_t max_edits = 1;
  // Restrict substitutions to confusion-pair members (no same-kind fallback).
  bool confusion_only = false;
  std::uint64_t seed = 0;

  static InjectionConfig defaults();
};

struct InjectionResult {
  TokenSequence corrupted;
  EditScript script;  // align(corrupted, gt)
};

// Applies 1..max_edits seeded edits to gt; the result always differs from gt.
// Substitutions draw from confusion_pairs when the token participates in a
// pair, otherwise from a same-kind pool. Identical seed + input gives
// identical output. Throws EditError::NothingToCorrupt when the config (or
// the input under confusion_only) admits no edit.
InjectionResult inject_errors(const TokenSequence& gt, const InjectionConfig& cfg);

}  // namespace hmertk::editops
