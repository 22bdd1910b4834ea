#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "hmertk/error.hpp"
#include "hmertk/token.hpp"

namespace hmertk {

class NormalizeError : public Error {
 public:
  enum class Code { MalformedScript, MissingArgument, UnbalancedBraces };

  NormalizeError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Rewrite rules applied by clean() and normalize(). Defaults match the
// CROHME-style token inventory; a config file can extend them (see
// load_normalization_config in config.hpp).
struct NormalizationConfig {
  // Shorter alias -> canonical control word, e.g. "\le" -> "\leq".
  // Must be acyclic with chain length 1; validate_aliases() enforces this.
  std::map<std::string, std::string> alias_map;

  // Style macros unwrapped during normalization: "\textbf { a }" -> "a".
  std::set<std::string> strip_styles;

  // Token subsequences deleted outright by clean(), e.g. "\underline { \quad }".
  std::vector<TokenSequence> remove_tokens;

  // Extra control words accepted by validate() on top of the built-in
  // vocabulary.
  std::set<std::string> extra_vocabulary;

  static NormalizationConfig defaults();

  // Throws ConfigError if any alias target is itself an alias key (chains
  // longer than 1) or maps to itself.
  void validate_aliases() const;
};

// Deletes every configured remove_tokens subsequence and every empty brace
// pair "{ }", repeating until fixpoint. Never fails; an emptied-out sequence
// is reported by validate().
TokenSequence clean(const TokenSequence& seq, const NormalizationConfig& cfg);

// Canonicalizes a cleaned, brace-balanced sequence. Passes, in order:
//   1. alias substitution            (\le -> \leq)
//   2. style stripping               (\textbf { a } -> a, to fixpoint)
//   3. brace transform               (a ^ 2 -> a ^ { 2 }; \frac a 2 -> \frac { a } { 2 })
//   4. root transform                (\sqrt [ 2 ] a -> \sqrt [ 2 ] { a })
//   5. sub/sup reorder               (x ^ { b } _ { a } -> x _ { a } ^ { b })
// The result is idempotent under normalize.
//
// Throws NormalizeError: MalformedScript if ^/_ lacks an argument,
// MissingArgument if \frac lacks two arguments (or \sqrt its radicand),
// UnbalancedBraces if the precondition is violated.
TokenSequence normalize(const TokenSequence& seq, const NormalizationConfig& cfg);

}  // namespace hmertk
