#include <cstdio>
#include <fstream>
#include <regex>

#include "doctest.h"
#include "hmertk/config.hpp"
#include "hmertk/normalize.hpp"
#include "hmertk/tokenizer.hpp"
#include "hmertk/validate.hpp"
#include "test_util.hpp"

using namespace hmertk;

namespace {

std::vector<std::string> token_texts(const TokenSequence& seq) {
  std::vector<std::string> out;
  for (const Token& t : seq) out.push_back(t.text);
  return out;
}

// Regex-based reference tokenizer (ASCII inputs only): control word, control
// symbol, or any single non-space character.
std::vector<std::string> reference_tokenize(const std::string& raw) {
  static const std::regex pattern(R"(\\[A-Za-z]+|\\.|\S)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(raw.begin(), raw.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

std::string normalized(const std::string& raw) {
  NormalizationConfig cfg = NormalizationConfig::defaults();
  return detokenize(normalize(clean(tokenize(raw), cfg), cfg));
}

std::string strip_spaces(std::string s) {
  std::erase_if(s, [](char c) { return c == ' ' || c == '\t' || c == '\n'; });
  return s;
}

}  // namespace

TEST_CASE("tokenize splits control words, characters and structure") {
  CHECK(token_texts(tokenize("\\frac a^2 2")) ==
        std::vector<std::string>{"\\frac", "a", "^", "2", "2"});
  CHECK(token_texts(tokenize("x")) == std::vector<std::string>{"x"});
  CHECK(token_texts(tokenize("\\alpha_{12}")) ==
        std::vector<std::string>{"\\alpha", "_", "{", "1", "2", "}"});
  CHECK(tokenize("ab12")[0].kind == TokenKind::Character);
  CHECK(tokenize("\\{ \\%")[0].kind == TokenKind::ControlWord);
  CHECK(token_texts(tokenize("\\{ \\%")) == std::vector<std::string>{"\\{", "\\%"});
}

TEST_CASE("tokenize agrees with the regex reference scanner") {
  const std::vector<std::string> fixtures = {
      "\\frac a^2 2",
      "\\alpha_{12}",
      "x + y = z",
      "\\sqrt[2]{a+b}",
      "\\int_a^b f(x) dx",
      "\\textbf{a} \\le 1",
      "| \\frac { a x _ { 0 } + b y _ { 0 } + c } { \\sqrt { a ^ { 2 } + b ^ { 2 } } } |",
      "\\sum_{i=1}^{n} i^2",
      "\\% \\{ \\} escaped",
  };
  for (const std::string& raw : fixtures) {
    CAPTURE(raw);
    CHECK(token_texts(tokenize(raw)) == reference_tokenize(raw));
  }
}

TEST_CASE("tokenize rejects blank and CJK input") {
  CHECK_THROWS_WITH_AS(tokenize(""), doctest::Contains("blank"), TokenizeError);
  CHECK_THROWS_AS(tokenize("   \t "), TokenizeError);
  for (const char* bad : {"中", "a ひ b", "カ", "한", "\u3400"}) {
    CAPTURE(bad);
    try {
      tokenize(bad);
      FAIL("expected CjkContent for " << bad);
    } catch (const TokenizeError& e) {
      CHECK(e.code() == TokenizeError::Code::CjkContent);
    }
  }
}

TEST_CASE("detokenize joins with single spaces") {
  CHECK(detokenize({control_word("\\frac"), open_brace(), character("a"),
                    close_brace(), open_brace(), character("2"), close_brace()}) ==
        "\\frac { a } { 2 }");
  CHECK(detokenize({}) == "");
  CHECK(detokenize({character("H"), superscript(), open_brace(), character("I"),
                    close_brace()}) == "H ^ { I }");
}

TEST_CASE("tokenize/detokenize round-trip on generated expressions") {
  testutil::ExpressionGenerator gen(20240601);
  for (int i = 0; i < 300; ++i) {
    std::string raw = gen.expression();
    TokenSequence seq = tokenize(raw);
    CHECK(tokenize(detokenize(seq)) == seq);
    // Whitespace-canonical reproduction of the raw string.
    CHECK(strip_spaces(detokenize(seq)) == strip_spaces(raw));
  }
}

TEST_CASE("clean removes empty brace pairs and configured sequences") {
  NormalizationConfig cfg = NormalizationConfig::defaults();
  CHECK(detokenize(clean(tokenize("a { } b"), cfg)) == "a b");
  CHECK(detokenize(clean(tokenize("\\underline { \\quad } x"), cfg)) == "x");
  CHECK(detokenize(clean(tokenize("a b"), cfg)) == "a b");
  CHECK(detokenize(clean(tokenize("{ { } }"), cfg)) == "");
  CHECK(detokenize(clean(tokenize("a { { } } b"), cfg)) == "a b");
}

TEST_CASE("clean reaches a fixpoint") {
  NormalizationConfig cfg = NormalizationConfig::defaults();
  testutil::ExpressionGenerator gen(99);
  for (int i = 0; i < 200; ++i) {
    TokenSequence seq = tokenize(gen.expression());
    TokenSequence once = clean(seq, cfg);
    CHECK(clean(once, cfg) == once);
  }
}

TEST_CASE("normalize matches the published transforms") {
  CHECK(normalized("\\frac a ^ 2 2") == "\\frac { a ^ { 2 } } { 2 }");
  CHECK(normalized("\\frac a^2 2") == "\\frac { a ^ { 2 } } { 2 }");
  CHECK(normalized("H^I") == "H ^ { I }");
  CHECK(normalized("\\int ^ { b } _ { a }") == "\\int _ { a } ^ { b }");
  CHECK(normalized("\\sqrt [ 2 ] a") == "\\sqrt [ 2 ] { a }");
  CHECK(normalized("\\textbf { a }") == "a");
}

TEST_CASE("normalize handles aliases, styles and nesting") {
  CHECK(normalized("a \\le b") == "a \\leq b");
  CHECK(normalized("a \\ge b \\ne c") == "a \\geq b \\neq c");
  CHECK(normalized("\\textbf { \\textit { a b } }") == "a b");
  CHECK(normalized("\\mathrm x") == "x");
  CHECK(normalized("\\frac \\alpha \\beta") == "\\frac { \\alpha } { \\beta }");
  CHECK(normalized("\\sqrt x ^ 2") == "\\sqrt { x } ^ { 2 }");
  CHECK(normalized("x ^ 2 _ 3") == "x _ { 3 } ^ { 2 }");
  CHECK(normalized("\\sum _ { i = 1 } ^ n i") == "\\sum _ { i = 1 } ^ { n } i");
}

TEST_CASE("normalize error paths") {
  NormalizationConfig cfg = NormalizationConfig::defaults();
  CHECK_THROWS_AS(normalize(tokenize("a ^"), cfg), NormalizeError);
  CHECK_THROWS_AS(normalize(tokenize("a ^ ^ b"), cfg), NormalizeError);
  CHECK_THROWS_AS(normalize(tokenize("\\frac a"), cfg), NormalizeError);
  CHECK_THROWS_AS(normalize(tokenize("\\sqrt"), cfg), NormalizeError);
  try {
    normalize(tokenize("\\frac x"), cfg);
    FAIL("expected MissingArgument");
  } catch (const NormalizeError& e) {
    CHECK(e.code() == NormalizeError::Code::MissingArgument);
  }
}

TEST_CASE("normalize is idempotent and preserves brace balance") {
  NormalizationConfig cfg = NormalizationConfig::defaults();
  testutil::ExpressionGenerator gen(777);
  for (int i = 0; i < 300; ++i) {
    std::string raw = gen.expression();
    CAPTURE(raw);
    TokenSequence seq = clean(tokenize(raw), cfg);
    TokenSequence once = normalize(seq, cfg);
    CHECK(normalize(once, cfg) == once);
    int depth = 0;
    bool balanced = true;
    for (const Token& t : once) {
      if (t.kind == TokenKind::OpenBrace) ++depth;
      if (t.kind == TokenKind::CloseBrace && --depth < 0) balanced = false;
    }
    CHECK(balanced);
    CHECK(depth == 0);
  }
}

TEST_CASE("validate reports positions and codes") {
  ValidationReport r1 = validate(tokenize("{ a"));
  REQUIRE(!r1.ok);
  REQUIRE(r1.issues.size() == 1);
  CHECK(r1.issues[0].code == IssueCode::UnbalancedBraces);
  CHECK(r1.issues[0].position == 0);

  ValidationReport r2 = validate(tokenize("a ^"));
  REQUIRE(!r2.ok);
  REQUIRE(r2.issues.size() == 1);
  CHECK(r2.issues[0].code == IssueCode::DanglingScript);
  CHECK(r2.issues[0].position == 1);

  CHECK(validate(tokenize("\\frac { a } { b }")).ok);
  CHECK(validate(tokenize("a _ { 0 }")).ok);

  ValidationReport r3 = validate(tokenize("a } b"));
  CHECK(!r3.ok);
  CHECK(r3.issues[0].code == IssueCode::UnbalancedBraces);
  CHECK(r3.issues[0].position == 1);

  ValidationReport r4 = validate(tokenize("a ^ }  z"));
  CHECK(!r4.ok);

  ValidationReport r5 = validate(tokenize("^ { 2 }"));
  CHECK(!r5.ok);
  CHECK(r5.issues[0].code == IssueCode::DanglingScript);

  ValidationReport r6 = validate(tokenize("a \\notaword b"));
  REQUIRE(!r6.ok);
  CHECK(r6.issues[0].code == IssueCode::UnknownControlWord);
  CHECK(r6.issues[0].position == 1);

  CHECK(validate(TokenSequence{}).issues[0].code == IssueCode::EmptyInput);

  ValidationReport raw_cjk = validate_raw("a 中 b");
  CHECK(!raw_cjk.ok);
  CHECK(raw_cjk.issues[0].code == IssueCode::CjkContent);
}

TEST_CASE("normalization config file round-trip") {
  std::string path = "test_norm_config.conf";
  {
    std::ofstream out(path);
    out << "# test config\n"
        << "[aliases]\n"
        << "\\lt = <\n"
        << "[strip_styles]\n"
        << "\\mathbb\n"
        << "[remove_tokens]\n"
        << "\\quad\n"
        << "[vocabulary]\n"
        << "\\customword\n";
  }
  NormalizationConfig cfg = load_normalization_config(path);
  CHECK(cfg.alias_map == std::map<std::string, std::string>{{"\\lt", "<"}});
  CHECK(cfg.strip_styles == std::set<std::string>{"\\mathbb"});
  REQUIRE(cfg.remove_tokens.size() == 1);
  CHECK(detokenize(cfg.remove_tokens[0]) == "\\quad");
  CHECK(cfg.extra_vocabulary.count("\\customword") == 1);
  std::remove(path.c_str());
}

TEST_CASE("alias chains are rejected") {
  NormalizationConfig cfg;
  cfg.alias_map = {{"\\le", "\\leq"}, {"\\leq", "\\le2"}};
  CHECK_THROWS_AS(cfg.validate_aliases(), ConfigError);
  cfg.alias_map = {{"\\le", "\\le"}};
  CHECK_THROWS_AS(cfg.validate_aliases(), ConfigError);
  cfg.alias_map = {{"\\le", "\\leq"}, {"\\ge", "\\geq"}};
  CHECK_NOTHROW(cfg.validate_aliases());
}
