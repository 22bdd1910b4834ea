#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hmertk/token.hpp"

namespace hmertk {

enum class IssueCode {
  UnbalancedBraces,
  DanglingScript,
  UnknownControlWord,
  CjkContent,
  EmptyInput,
};

std::string_view issue_code_name(IssueCode code);

struct Issue {
  IssueCode code;
  std::size_t position;  // token index (byte offset for raw-string issues)
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Issue> issues;
};

// Multi-letter control words accepted by validate(). Control symbols
// ("\{", "\%", ...) are always accepted.
class Vocabulary {
 public:
  // The built-in CROHME-style inventory.
  static const Vocabulary& builtin();

  Vocabulary() = default;
  explicit Vocabulary(std::set<std::string> words) : words_(std::move(words)) {}

  bool contains(const std::string& control_word) const;
  void add(const std::string& control_word) { words_.insert(control_word); }
  void add_all(const std::set<std::string>& words);
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string> words_;
};

// Reports brace imbalances, dangling script markers (no argument or no base),
// and control words outside the vocabulary. Returns, never throws.
ValidationReport validate(const TokenSequence& seq,
                          const Vocabulary& vocab = Vocabulary::builtin());

// Convenience for raw strings: tokenize failures surface as EmptyInput /
// CjkContent issues instead of exceptions.
ValidationReport validate_raw(std::string_view raw,
                              const Vocabulary& vocab = Vocabulary::builtin());

}  // namespace hmertk
