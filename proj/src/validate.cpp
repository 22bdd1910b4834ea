#include "hmertk/validate.hpp"

#include <cctype>
#include <vector>

#include "hmertk/tokenizer.hpp"

namespace hmertk {

std::string_view issue_code_name(IssueCode code) {
  switch (code) {
    case IssueCode::UnbalancedBraces: return "UnbalancedBraces";
    case IssueCode::DanglingScript: return "DanglingScript";
    case IssueCode::UnknownControlWord: return "UnknownControlWord";
    case IssueCode::CjkContent: return "CjkContent";
    case IssueCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

bool Vocabulary::contains(const std::string& control_word) const {
  return words_.count(control_word) > 0;
}

void Vocabulary::add_all(const std::set<std::string>& words) {
  words_.insert(words.begin(), words.end());
}

ValidationReport validate(const TokenSequence& seq, const Vocabulary& vocab) {
  ValidationReport report;
  auto add = [&](IssueCode code, std::size_t pos, std::string detail) {
    report.issues.push_back({code, pos, std::move(detail)});
  };

  if (seq.empty()) {
    add(IssueCode::EmptyInput, 0, "token sequence is empty");
    report.ok = false;
    return report;
  }

  std::vector<std::size_t> open_stack;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Token& t = seq[i];
    if (t.kind == TokenKind::OpenBrace) {
      open_stack.push_back(i);
    } else if (t.kind == TokenKind::CloseBrace) {
      if (open_stack.empty()) {
        add(IssueCode::UnbalancedBraces, i, "unmatched '}'");
      } else {
        open_stack.pop_back();
      }
    }
  }
  for (std::size_t i : open_stack) {
    add(IssueCode::UnbalancedBraces, i, "unmatched '{'");
  }

  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!is_script_marker(seq[i])) continue;
    const std::string& m = seq[i].text;
    bool no_argument = i + 1 == seq.size() ||
                       seq[i + 1].kind == TokenKind::CloseBrace ||
                       is_script_marker(seq[i + 1]);
    bool no_base = i == 0 || seq[i - 1].kind == TokenKind::OpenBrace ||
                   seq[i - 1].kind == TokenKind::OpenBracket ||
                   is_script_marker(seq[i - 1]);
    if (no_argument) {
      add(IssueCode::DanglingScript, i, "'" + m + "' has no argument");
    } else if (no_base) {
      add(IssueCode::DanglingScript, i, "'" + m + "' has no base");
    }
  }

  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Token& t = seq[i];
    if (t.kind != TokenKind::ControlWord) continue;
    // Control symbols (backslash + one non-letter) are valid by construction.
    if (t.text.size() >= 2 && !std::isalpha(static_cast<unsigned char>(t.text[1]))) {
      continue;
    }
    if (!vocab.contains(t.text)) {
      add(IssueCode::UnknownControlWord, i, t.text);
    }
  }

  report.ok = report.issues.empty();
  return report;
}

ValidationReport validate_raw(std::string_view raw, const Vocabulary& vocab) {
  TokenSequence seq;
  try {
    seq = tokenize(raw);
  } catch (const TokenizeError& e) {
    ValidationReport report;
    report.ok = false;
    IssueCode code = e.code() == TokenizeError::Code::CjkContent
                         ? IssueCode::CjkContent
                         : IssueCode::EmptyInput;
    report.issues.push_back({code, 0, e.what()});
    return report;
  }
  return validate(seq, vocab);
}

}  // namespace hmertk
