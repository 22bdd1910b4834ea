#pragma once

#include <string_view>

#include "hmertk/error.hpp"
#include "hmertk/token.hpp"

namespace hmertk {

class TokenizeError : public Error {
 public:
  enum class Code { EmptyInput, CjkContent, MalformedUtf8 };

  TokenizeError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Deterministic scanner over a raw LaTeX math string:
//   - "\" + one or more ASCII letters  -> one ControlWord (greedy)
//   - "\" + one non-letter code point  -> one ControlWord (control symbol)
//   - "{" "}" "[" "]" "^" "_"          -> the structural kinds
//   - any other non-whitespace code point -> one Character token
// Whitespace only separates tokens; digits and letters always split into
// single-character tokens.
//
// Throws TokenizeError: EmptyInput if the string is blank after trimming,
// CjkContent if any code point falls in the CJK Unified Ideographs
// (+ Extension A), Hiragana, Katakana, or Hangul Syllables ranges,
// MalformedUtf8 on invalid byte sequences.
TokenSequence tokenize(std::string_view raw);

bool is_cjk_code_point(char32_t cp);

}  // namespace hmertk
