#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hmertk {

// Atomic LaTeX unit. Token texts never contain whitespace, so a sequence
// interchanges losslessly as its single-space-joined string.
enum class TokenKind : std::uint8_t {
  ControlWord,   // "\frac", "\alpha", or a control symbol like "\{" "\%"
  Character,     // exactly one code point: "a", "2", "+", "|"
  OpenBrace,     // "{"
  CloseBrace,    // "}"
  OpenBracket,   // "["
  CloseBracket,  // "]"
  Superscript,   // "^"
  Subscript,     // "_"
};

struct Token {
  TokenKind kind;
  std::string text;

  bool operator==(const Token&) const = default;
};

using TokenSequence = std::vector<Token>;

inline Token control_word(std::string text) {
  return {TokenKind::ControlWord, std::move(text)};
}
inline Token character(std::string text) {
  return {TokenKind::Character, std::move(text)};
}
inline Token open_brace() { return {TokenKind::OpenBrace, "{"}; }
inline Token close_brace() { return {TokenKind::CloseBrace, "}"}; }
inline Token open_bracket() { return {TokenKind::OpenBracket, "["}; }
inline Token close_bracket() { return {TokenKind::CloseBracket, "]"}; }
inline Token superscript() { return {TokenKind::Superscript, "^"}; }
inline Token subscript() { return {TokenKind::Subscript, "_"}; }

inline bool is_brace(const Token& t) {
  return t.kind == TokenKind::OpenBrace || t.kind == TokenKind::CloseBrace;
}
inline bool is_bracket(const Token& t) {
  return t.kind == TokenKind::OpenBracket || t.kind == TokenKind::CloseBracket;
}
inline bool is_script_marker(const Token& t) {
  return t.kind == TokenKind::Superscript || t.kind == TokenKind::Subscript;
}

// Joins token texts with exactly one space. Inverse of tokenize() up to
// whitespace: tokenize(detokenize(s)) == s for every well-formed s.
std::string detokenize(const TokenSequence& seq);

}  // namespace hmertk
