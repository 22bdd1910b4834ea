#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hmertk/token.hpp"

namespace testutil {

// Independent full-matrix Levenshtein oracle. Deliberately a separate code
// path from both editops::align (suffix DP + backtrace) and
// metrics::token_edit_distance (rolling rows).
inline std::size_t brute_force_levenshtein(const hmertk::TokenSequence& a,
                                           const hmertk::TokenSequence& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t best = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      if (d[i - 1][j] + 1 < best) best = d[i - 1][j] + 1;
      if (d[i][j - 1] + 1 < best) best = d[i][j - 1] + 1;
      d[i][j] = best;
    }
  }
  return d[a.size()][b.size()];
}

inline const std::vector<std::string>& flat_alphabet() {
  static const std::vector<std::string> alphabet = {
      "a", "b", "c", "d", "x", "y", "z", "n", "m", "k",
      "0", "1", "2", "3", "4", "5", "6", "7", "8", "9",
      "+", "-", "=", "(", ")", "|", ",", ".", "<", ">",
      "\\alpha", "\\beta", "\\pi", "\\theta", "\\infty", "\\sum",
      "\\int", "\\cdot", "\\pm", "\\rightarrow",
  };
  return alphabet;
}

inline hmertk::Token flat_token(const std::string& text) {
  return text.size() > 1 && text.front() == '\\' ? hmertk::control_word(text)
                                                 : hmertk::character(text);
}

// Random flat sequence over a 40-token alphabet (no structure).
inline hmertk::TokenSequence random_flat_sequence(std::mt19937_64& rng,
                                                  std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, flat_alphabet().size() - 1);
  hmertk::TokenSequence seq;
  std::size_t len = len_dist(rng);
  seq.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    seq.push_back(flat_token(flat_alphabet()[pick(rng)]));
  }
  return seq;
}

// Random well-formed LaTeX expression with nesting depth at most max_depth.
// Exercises scripts, \frac, \sqrt (with optional index), styles, aliases and
// bare brace groups, with both braced and bare single-token arguments.
class ExpressionGenerator {
 public:
  explicit ExpressionGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string expression(std::size_t max_depth = 4) {
    return chain(max_depth, 1 + pick(3));
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::size_t pick(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(rng_);
  }

  std::string atom() {
    static const std::vector<std::string> atoms = {
        "a", "b", "c", "x", "y", "z", "n", "0", "1", "2", "3", "7",
        "+", "-", "=", "|", "\\alpha", "\\beta", "\\pi", "\\theta",
        "\\infty", "\\cdot", "\\leq", "\\le", "\\rightarrow",
    };
    return atoms[pick(atoms.size())];
  }

  // A script / \frac / \sqrt argument: bare atom or braced chain.
  std::string argument(std::size_t depth) {
    if (depth == 0 || pick(2) == 0) return atom();
    return "{ " + chain(depth, 1 + pick(2)) + " }";
  }

  std::string term(std::size_t depth) {
    std::size_t kind = pick(depth == 0 ? 2 : 8);
    switch (kind) {
      case 0:
      case 1:
        return atom();
      case 2:
        return atom() + " ^ " + argument(depth - 1);
      case 3:
        return atom() + " _ " + argument(depth - 1);
      case 4:
        return atom() + " _ " + argument(depth - 1) + " ^ " + argument(depth - 1);
      case 5:
        return "\\frac " + argument(depth - 1) + " " + argument(depth - 1);
      case 6:
        return pick(3) == 0
                   ? "\\sqrt [ " + std::to_string(2 + pick(3)) + " ] " +
                         argument(depth - 1)
                   : "\\sqrt " + argument(depth - 1);
      default:
        return pick(2) == 0 ? "\\textbf { " + chain(depth - 1, 1) + " }"
                            : "{ " + chain(depth - 1, 1 + pick(2)) + " }";
    }
  }

  std::string chain(std::size_t depth, std::size_t terms) {
    std::string out;
    for (std::size_t i = 0; i < terms; ++i) {
      if (!out.empty()) out += " ";
      out += term(depth);
    }
    return out;
  }

  std::mt19937_64 rng_;
};

}  // namespace testutil
