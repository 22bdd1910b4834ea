#include "hmertk/tokenizer.hpp"

#include <cctype>

#include "utf8.hpp"

namespace hmertk {

namespace {

bool is_ascii_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v';
}

bool is_ascii_letter(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

}  // namespace

bool is_cjk_code_point(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||   // CJK Unified Ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||   // Extension A
         (cp >= 0x3040 && cp <= 0x309F) ||   // Hiragana
         (cp >= 0x30A0 && cp <= 0x30FF) ||   // Katakana
         (cp >= 0xAC00 && cp <= 0xD7AF);     // Hangul Syllables
}

std::string detokenize(const TokenSequence& seq) {
  std::string out;
  for (const Token& t : seq) {
    if (!out.empty()) out.push_back(' ');
    out += t.text;
  }
  return out;
}

TokenSequence tokenize(std::string_view raw) {
  TokenSequence tokens;
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t start = pos;
    char32_t cp = utf8::decode(raw, pos);
    if (cp == utf8::kInvalid) {
      throw TokenizeError(TokenizeError::Code::MalformedUtf8,
                          "malformed UTF-8 at byte " + std::to_string(start));
    }
    if (is_ascii_space(cp)) continue;
    if (is_cjk_code_point(cp)) {
      throw TokenizeError(TokenizeError::Code::CjkContent,
                          "CJK code point at byte " + std::to_string(start));
    }
    switch (cp) {
      case '{':
        tokens.push_back(open_brace());
        continue;
      case '}':
        tokens.push_back(close_brace());
        continue;
      case '[':
        tokens.push_back(open_bracket());
        continue;
      case ']':
        tokens.push_back(close_bracket());
        continue;
      case '^':
        tokens.push_back(superscript());
        continue;
      case '_':
        tokens.push_back(subscript());
        continue;
      default:
        break;
    }
    if (cp == '\\') {
      std::string text = "\\";
      std::size_t probe = pos;
      if (probe >= raw.size()) {
        // Lone trailing backslash: keep it as a control symbol of itself.
        tokens.push_back(control_word(text));
        continue;
      }
      char32_t next = utf8::decode(raw, probe);
      if (next == utf8::kInvalid) {
        throw TokenizeError(TokenizeError::Code::MalformedUtf8,
                            "malformed UTF-8 at byte " + std::to_string(pos));
      }
      if (is_ascii_letter(next)) {
        while (pos < raw.size() && is_ascii_letter(static_cast<unsigned char>(raw[pos]))) {
          text.push_back(raw[pos]);
          ++pos;
        }
      } else {
        if (is_cjk_code_point(next)) {
          throw TokenizeError(TokenizeError::Code::CjkContent,
                              "CJK code point at byte " + std::to_string(pos));
        }
        utf8::append(text, next);
        pos = probe;
      }
      tokens.push_back(control_word(std::move(text)));
      continue;
    }
    std::string text;
    utf8::append(text, cp);
    tokens.push_back(character(std::move(text)));
  }
  if (tokens.empty()) {
    throw TokenizeError(TokenizeError::Code::EmptyInput,
                        "input is blank after trimming whitespace");
  }
  return tokens;
}

}  // namespace hmertk
