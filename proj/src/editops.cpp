#include "hmertk/editops.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace hmertk::editops {

namespace {

void check_reserved_tags(const TokenSequence& seq, const char* side) {
  for (const Token& t : seq) {
    if (t.text == kErrorStartTag || t.text == kErrorEndTag ||
        t.text == kDeletedTag) {
      throw EditError(EditError::Code::ReservedTag,
                      std::string(side) + " contains reserved tag token '" +
                          t.text + "'");
    }
  }
}

std::string join_range(const TokenSequence& seq, const Span& span) {
  std::string out;
  for (std::size_t i = span.begin; i < span.end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += seq[i].text;
  }
  return out;
}

void append_op(std::vector<EditOp>& ops, OpKind kind, Span pred, Span gt) {
  if (!ops.empty() && ops.back().kind == kind) {
    ops.back().pred.end = pred.end;
    ops.back().gt.end = gt.end;
    return;
  }
  ops.push_back({kind, pred, gt});
}

}  // namespace

std::size_t EditScript::cost() const {
  std::size_t total = 0;
  for (const EditOp& op : ops) {
    switch (op.kind) {
      case OpKind::Match: break;
      case OpKind::Replace: total += op.pred.size(); break;
      case OpKind::Insert: total += op.gt.size(); break;
      case OpKind::Delete: total += op.pred.size(); break;
    }
  }
  return total;
}

EditScript align(const TokenSequence& pred, const TokenSequence& gt) {
  check_reserved_tags(pred, "prediction");
  check_reserved_tags(gt, "ground truth");

  const std::size_t n = pred.size();
  const std::size_t m = gt.size();

  // d[i][j] = edit distance between pred[i..n) and gt[j..m). The suffix
  // formulation lets the backtrace walk forward, which makes leftmost-first
  // tie-breaking direct.
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][m] = n - i;
  for (std::size_t j = 0; j <= m; ++j) d[n][j] = m - j;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      if (pred[i] == gt[j]) {
        d[i][j] = d[i + 1][j + 1];
      } else {
        d[i][j] = 1 + std::min({d[i + 1][j + 1], d[i + 1][j], d[i][j + 1]});
      }
    }
  }

  EditScript script;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && pred[i] == gt[j] && d[i][j] == d[i + 1][j + 1]) {
      append_op(script.ops, OpKind::Match, {i, i + 1}, {j, j + 1});
      ++i, ++j;
    } else if (i < n && j < m && pred[i] != gt[j] &&
               d[i][j] == d[i + 1][j + 1] + 1) {
      append_op(script.ops, OpKind::Replace, {i, i + 1}, {j, j + 1});
      ++i, ++j;
    } else if (i < n && d[i][j] == d[i + 1][j] + 1) {
      append_op(script.ops, OpKind::Delete, {i, i + 1}, {j, j});
      ++i;
    } else {
      append_op(script.ops, OpKind::Insert, {i, i}, {j, j + 1});
      ++j;
    }
  }
  return script;
}

TokenSequence apply(const EditScript& script, const TokenSequence& pred,
                    const TokenSequence& gt) {
  TokenSequence out;
  std::size_t pi = 0, gi = 0;
  for (const EditOp& op : script.ops) {
    if (op.pred.begin != pi || op.gt.begin != gi || op.pred.end > pred.size() ||
        op.gt.end > gt.size()) {
      throw EditError(EditError::Code::SpanMismatch,
                      "edit script spans do not tile the sequences");
    }
    switch (op.kind) {
      case OpKind::Match:
        for (std::size_t k = op.pred.begin; k < op.pred.end; ++k)
          out.push_back(pred[k]);
        break;
      case OpKind::Replace:
      case OpKind::Insert:
        for (std::size_t k = op.gt.begin; k < op.gt.end; ++k)
          out.push_back(gt[k]);
        break;
      case OpKind::Delete:
        break;
    }
    pi = op.pred.end;
    gi = op.gt.end;
  }
  if (pi != pred.size() || gi != gt.size()) {
    throw EditError(EditError::Code::SpanMismatch,
                    "edit script does not cover both sequences");
  }
  return out;
}

std::vector<ErrorSpan> error_spans(const EditScript& script) {
  std::vector<ErrorSpan> spans;
  bool in_error = false;
  for (const EditOp& op : script.ops) {
    if (op.kind == OpKind::Match) {
      in_error = false;
      continue;
    }
    if (in_error) {
      spans.back().pred.end = op.pred.end;
      spans.back().gt.end = op.gt.end;
    } else {
      spans.push_back({op.pred, op.gt});
      in_error = true;
    }
  }
  return spans;
}

MarkedExpression mark_errors(const TokenSequence& pred, const EditScript& script) {
  // Re-validate tiling against this prediction before rendering.
  std::size_t pi = 0;
  for (const EditOp& op : script.ops) {
    if (op.pred.begin != pi || op.pred.end > pred.size()) {
      throw EditError(EditError::Code::SpanMismatch,
                      "edit script spans do not tile the prediction");
    }
    pi = op.pred.end;
  }
  if (pi != pred.size()) {
    throw EditError(EditError::Code::SpanMismatch,
                    "edit script does not cover the prediction");
  }

  std::vector<std::string> pieces;
  std::size_t cursor = 0;
  auto emit_matches_until = [&](std::size_t end) {
    for (; cursor < end; ++cursor) pieces.push_back(pred[cursor].text);
  };
  for (const ErrorSpan& span : error_spans(script)) {
    emit_matches_until(span.pred.begin);
    if (span.pred.empty()) {
      pieces.emplace_back(kDeletedTag);
    } else {
      pieces.emplace_back(kErrorStartTag);
      for (std::size_t k = span.pred.begin; k < span.pred.end; ++k)
        pieces.push_back(pred[k].text);
      pieces.emplace_back(kErrorEndTag);
      cursor = span.pred.end;
    }
  }
  emit_matches_until(pred.size());

  std::string text;
  for (const std::string& p : pieces) {
    if (!text.empty()) text.push_back(' ');
    text += p;
  }
  return MarkedExpression{std::move(text)};
}

std::string strip_markup(std::string_view marked) {
  std::istringstream in{std::string(marked)};
  std::string word;
  std::string out;
  while (in >> word) {
    if (word == kErrorStartTag || word == kErrorEndTag || word == kDeletedTag)
      continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::vector<CorrectionRound> correction_rounds(const TokenSequence& pred,
                                               const TokenSequence& gt) {
  EditScript script = align(pred, gt);
  std::vector<ErrorSpan> spans = error_spans(script);
  if (spans.empty()) {
    throw EditError(EditError::Code::NoErrors,
                    "prediction equals the ground truth");
  }

  std::vector<CorrectionRound> rounds;
  rounds.reserve(spans.size());
  for (const ErrorSpan& span : spans) {
    // Base text: ground truth with this one error re-introduced. All other
    // spans are already fixed, so the round carries exactly one error.
    std::vector<std::string> pieces;
    for (std::size_t k = 0; k < span.gt.begin; ++k) pieces.push_back(gt[k].text);
    if (span.pred.empty()) {
      pieces.emplace_back(kDeletedTag);
    } else {
      pieces.emplace_back(kErrorStartTag);
      for (std::size_t k = span.pred.begin; k < span.pred.end; ++k)
        pieces.push_back(pred[k].text);
      pieces.emplace_back(kErrorEndTag);
    }
    for (std::size_t k = span.gt.end; k < gt.size(); ++k)
      pieces.push_back(gt[k].text);

    std::string marked;
    for (const std::string& p : pieces) {
      if (!marked.empty()) marked.push_back(' ');
      marked += p;
    }

    std::string log_line;
    if (!span.pred.empty() && !span.gt.empty()) {
      log_line = "REPLACE:" + join_range(pred, span.pred) + " -> " +
                 join_range(gt, span.gt);
    } else if (span.pred.empty()) {
      log_line = "INSERT:" + join_range(gt, span.gt);
    } else {
      log_line = "DELETE:" + join_range(pred, span.pred);
    }

    rounds.push_back({MarkedExpression{std::move(marked)}, std::move(log_line), gt});
  }
  return rounds;
}

namespace {

const char* const kCharacterPool[] = {
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "m", "n", "o",
    "p", "q", "r", "s", "t", "u", "v", "w", "x", "y", "z", "0", "1", "2",
    "3", "4", "5", "6", "7", "8", "9", "+", "-", "=", "(", ")", "|", ".",
    ",",
};

const char* const kControlWordPool[] = {
    "\\alpha", "\\beta",  "\\gamma", "\\theta", "\\lambda", "\\mu",
    "\\pi",    "\\sigma", "\\phi",   "\\omega", "\\sum",    "\\int",
    "\\infty", "\\cdot",  "\\times", "\\pm",
};

bool edit_eligible(const Token& t) {
  return !is_brace(t) && !is_bracket(t) && !is_script_marker(t);
}

Token token_from_text(const std::string& text) {
  return text.size() > 1 && text.front() == '\\' ? control_word(text)
                                                 : character(text);
}

std::vector<std::string> confusion_partners(const InjectionConfig& cfg,
                                            const std::string& text) {
  std::vector<std::string> partners;
  for (const auto& [a, b] : cfg.confusion_pairs) {
    if (a == text) partners.push_back(b);
    if (b == text) partners.push_back(a);
  }
  return partners;
}

bool substitute_eligible(const InjectionConfig& cfg, const Token& t) {
  if (!edit_eligible(t)) return false;
  if (cfg.confusion_only) return !confusion_partners(cfg, t.text).empty();
  return true;
}

Token draw_substitute(const InjectionConfig& cfg, const Token& t,
                      std::mt19937_64& rng) {
  std::vector<std::string> partners = confusion_partners(cfg, t.text);
  if (!partners.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, partners.size() - 1);
    return token_from_text(partners[pick(rng)]);
  }
  // Same-kind fallback pool, never the token itself.
  if (t.kind == TokenKind::ControlWord) {
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kControlWordPool) - 1);
    for (;;) {
      std::string cand = kControlWordPool[pick(rng)];
      if (cand != t.text) return control_word(cand);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kCharacterPool) - 1);
  for (;;) {
    std::string cand = kCharacterPool[pick(rng)];
    if (cand != t.text) return character(cand);
  }
}

Token draw_insert(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kCharacterPool) - 1);
  return character(kCharacterPool[pick(rng)]);
}

struct PlanEdit {
  enum class Kind { Substitute, Delete, Insert };
  Kind kind;
  std::size_t pos;  // gt index; Insert places the value after gt[pos]
  Token value;
};

TokenSequence apply_plan(const TokenSequence& gt, const std::vector<PlanEdit>& plan) {
  TokenSequence out;
  out.reserve(gt.size() + plan.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const PlanEdit* edit = nullptr;
    for (const PlanEdit& e : plan) {
      if (e.pos == i) edit = &e;
    }
    if (edit && edit->kind == PlanEdit::Kind::Substitute) {
      out.push_back(edit->value);
    } else if (edit && edit->kind == PlanEdit::Kind::Delete) {
      // skip
    } else {
      out.push_back(gt[i]);
      if (edit && edit->kind == PlanEdit::Kind::Insert) {
        out.push_back(edit->value);
      }
    }
  }
  return out;
}

}  // namespace

InjectionConfig InjectionConfig::defaults() {
  InjectionConfig cfg;
  cfg.confusion_pairs = {{"2", "z"}, {"0", "o"}, {"3", "z"}, {"1", "i"}, {"1", "n"}};
  return cfg;
}

InjectionResult inject_errors(const TokenSequence& gt, const InjectionConfig& cfg) {
  if (gt.empty()) {
    throw EditError(EditError::Code::NothingToCorrupt, "input is empty");
  }
  const bool sub_on = cfg.p_substitute > 0.0;
  const bool del_on = cfg.p_delete > 0.0;
  const bool ins_on = cfg.p_insert > 0.0;
  if (!sub_on && !del_on && !ins_on) {
    throw EditError(EditError::Code::NothingToCorrupt,
                    "all edit kinds are disabled");
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t max_edits = std::max<std::size_t>(cfg.max_edits, 1);

  std::vector<PlanEdit> plan;
  for (std::size_t i = 0; i < gt.size() && plan.size() < max_edits; ++i) {
    double u = unit(rng);
    if (u < cfg.p_substitute) {
      if (substitute_eligible(cfg, gt[i])) {
        plan.push_back({PlanEdit::Kind::Substitute, i, draw_substitute(cfg, gt[i], rng)});
      }
    } else if (u < cfg.p_substitute + cfg.p_delete) {
      if (edit_eligible(gt[i])) {
        plan.push_back({PlanEdit::Kind::Delete, i, Token{}});
      }
    } else if (u < cfg.p_substitute + cfg.p_delete + cfg.p_insert) {
      plan.push_back({PlanEdit::Kind::Insert, i, draw_insert(rng)});
    }
  }

  if (plan.empty()) {
    // At least one edit is always applied: force the first possible one.
    bool forced = false;
    if (sub_on) {
      for (std::size_t i = 0; i < gt.size() && !forced; ++i) {
        if (substitute_eligible(cfg, gt[i])) {
          plan.push_back({PlanEdit::Kind::Substitute, i, draw_substitute(cfg, gt[i], rng)});
          forced = true;
        }
      }
    }
    if (!forced && del_on) {
      for (std::size_t i = 0; i < gt.size() && !forced; ++i) {
        if (edit_eligible(gt[i])) {
          plan.push_back({PlanEdit::Kind::Delete, i, Token{}});
          forced = true;
        }
      }
    }
    if (!forced && ins_on) {
      plan.push_back({PlanEdit::Kind::Insert, gt.size() - 1, draw_insert(rng)});
      forced = true;
    }
    if (!forced) {
      throw EditError(EditError::Code::NothingToCorrupt,
                      "no token in the input is eligible for the configured "
                      "edit kinds");
    }
  }

  TokenSequence corrupted = apply_plan(gt, plan);
  if (corrupted == gt) {
    // Only possible when a deletion and an insertion cancel out; re-drawing
    // the inserted value breaks the coincidence without changing edit count.
    for (PlanEdit& e : plan) {
      if (e.kind != PlanEdit::Kind::Insert) continue;
      Token original = e.value;
      for (const char* cand : kCharacterPool) {
        if (cand == original.text) continue;
        e.value = character(cand);
        corrupted = apply_plan(gt, plan);
        if (corrupted != gt) break;
      }
      if (corrupted != gt) break;
    }
  }

  return InjectionResult{corrupted, align(corrupted, gt)};
}

}  // namespace hmertk::editops
