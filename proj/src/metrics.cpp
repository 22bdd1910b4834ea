#include "hmertk/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hmertk/slt.hpp"
#include "hmertk/tokenizer.hpp"
#include "hmertk/validate.hpp"
#include "utf8.hpp"

namespace hmertk::metrics {

namespace {

constexpr double kBleuEpsilon = 1e-9;

template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::vector<char32_t> squashed_code_points(const std::string& s) {
  std::vector<char32_t> cps;
  std::size_t pos = 0;
  while (pos < s.size()) {
    char32_t cp = utf8::decode(s, pos);
    if (cp == ' ') continue;
    cps.push_back(cp);
  }
  return cps;
}

struct BleuAccumulator {
  std::size_t match[4] = {0, 0, 0, 0};
  std::size_t total[4] = {0, 0, 0, 0};
  std::size_t pred_len = 0;
  std::size_t ref_len = 0;

  void add(const TokenSequence& pred, const TokenSequence& ref) {
    pred_len += pred.size();
    ref_len += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      if (pred.size() < n) break;
      std::map<std::vector<std::string>, std::size_t> ref_grams;
      if (ref.size() >= n) {
        for (std::size_t i = 0; i + n <= ref.size(); ++i) {
          std::vector<std::string> g;
          for (std::size_t k = 0; k < n; ++k) g.push_back(ref[i + k].text);
          ++ref_grams[g];
        }
      }
      std::map<std::vector<std::string>, std::size_t> pred_grams;
      for (std::size_t i = 0; i + n <= pred.size(); ++i) {
        std::vector<std::string> g;
        for (std::size_t k = 0; k < n; ++k) g.push_back(pred[i + k].text);
        ++pred_grams[g];
      }
      for (const auto& [g, count] : pred_grams) {
        total[n - 1] += count;
        auto it = ref_grams.find(g);
        if (it != ref_grams.end()) {
          match[n - 1] += std::min(count, it->second);
        }
      }
    }
  }

  double value() const {
    if (pred_len == 0) return 0.0;
    double log_sum = 0.0;
    for (int n = 0; n < 4; ++n) {
      double p;
      if (total[n] == 0) {
        p = kBleuEpsilon;
      } else if (match[n] == 0) {
        p = kBleuEpsilon / static_cast<double>(total[n]);
      } else {
        p = static_cast<double>(match[n]) / static_cast<double>(total[n]);
      }
      log_sum += 0.25 * std::log(p);
    }
    double bp = pred_len >= ref_len
                    ? 1.0
                    : std::exp(1.0 - static_cast<double>(ref_len) /
                                         static_cast<double>(pred_len));
    return bp * std::exp(log_sum);
  }
};

std::string complexity_bucket_label(std::size_t c) {
  return c >= 3 ? "N3" : "N" + std::to_string(c);
}

std::string repetition_bucket_label(std::size_t r) {
  return r >= 5 ? "R5+" : "R" + std::to_string(r);
}

struct PairOutcome {
  enum class Status { Scored, Unparseable, DroppedCjk, DroppedInvalidReference };
  Status status = Status::Scored;
  PairScore score;
  TokenSequence pred_tokens;  // empty when unparseable
  TokenSequence gt_tokens;
};

PairOutcome score_one(const std::string& pred_raw, const std::string& gt_raw,
                      const NormalizationConfig& norm) {
  PairOutcome out;

  TokenSequence gt;
  try {
    gt = normalize(clean(tokenize(gt_raw), norm), norm);
  } catch (const Error&) {
    out.status = PairOutcome::Status::DroppedInvalidReference;
    return out;
  }
  if (gt.empty() || !validate(gt).ok) {
    // Unknown control words are tolerable in references; structural issues
    // are not.
    ValidationReport rep = gt.empty() ? ValidationReport{} : validate(gt);
    bool structural = gt.empty();
    for (const Issue& issue : rep.issues) {
      if (issue.code != IssueCode::UnknownControlWord) structural = true;
    }
    if (structural) {
      out.status = PairOutcome::Status::DroppedInvalidReference;
      return out;
    }
  }
  out.gt_tokens = gt;

  try {
    slt::Tree gt_tree = slt::build(gt);
    out.score.complexity_bucket = slt::complexity(gt_tree);
  } catch (const Error&) {
    out.status = PairOutcome::Status::DroppedInvalidReference;
    return out;
  }
  out.score.max_repetition = slt::max_repetition(gt);

  TokenSequence pred;
  try {
    pred = normalize(clean(tokenize(pred_raw), norm), norm);
  } catch (const TokenizeError& e) {
    if (e.code() == TokenizeError::Code::CjkContent) {
      out.status = PairOutcome::Status::DroppedCjk;
      return out;
    }
    out.status = PairOutcome::Status::Unparseable;
  } catch (const Error&) {
    out.status = PairOutcome::Status::Unparseable;
  }

  if (out.status == PairOutcome::Status::Unparseable) {
    out.score.exact = false;
    out.score.token_dist = gt.size();
    out.score.cer = 1.0;
    out.score.edit_score = 0.0;
    return out;
  }

  out.pred_tokens = pred;
  out.score.token_dist = token_edit_distance(pred, gt);
  out.score.exact = out.score.token_dist == 0;
  out.score.cer = cer(detokenize(pred), detokenize(gt));
  out.score.edit_score = edit_score(pred, gt);
  return out;
}

struct Accumulator {
  std::size_t n = 0;
  std::size_t exact = 0, within1 = 0, within2 = 0;
  double cer_sum = 0.0, edit_sum = 0.0;

  void add(const PairScore& s) {
    ++n;
    if (s.token_dist == 0) ++exact;
    if (s.token_dist <= 1) ++within1;
    if (s.token_dist <= 2) ++within2;
    cer_sum += s.cer;
    edit_sum += s.edit_score;
  }

  SubReport report() const {
    SubReport r;
    r.n = n;
    if (n == 0) return r;
    r.exprate = static_cast<double>(exact) / static_cast<double>(n);
    r.leq1 = static_cast<double>(within1) / static_cast<double>(n);
    r.leq2 = static_cast<double>(within2) / static_cast<double>(n);
    r.mean_cer = cer_sum / static_cast<double>(n);
    r.mean_edit_score = edit_sum / static_cast<double>(n);
    return r;
  }
};

std::map<std::string, std::string> read_tsv_map(const std::string& path,
                                                std::vector<std::string>& order) {
  std::ifstream in(path);
  if (!in) {
    throw MetricsError(MetricsError::Code::KeyMismatch,
                       "cannot open file: " + path);
  }
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw MetricsError(MetricsError::Code::KeyMismatch,
                         path + ":" + std::to_string(lineno) +
                             ": row has no TAB separator");
    }
    std::string key = line.substr(0, tab);
    if (out.emplace(key, line.substr(tab + 1)).second) {
      order.push_back(std::move(key));
    }
  }
  return out;
}

}  // namespace

std::size_t token_edit_distance(const TokenSequence& pred, const TokenSequence& gt) {
  return levenshtein(pred, gt);
}

double cer(const std::string& pred, const std::string& gt) {
  std::vector<char32_t> p = squashed_code_points(pred);
  std::vector<char32_t> g = squashed_code_points(gt);
  if (g.empty()) {
    throw MetricsError(MetricsError::Code::EmptyReference,
                       "CER reference is empty");
  }
  return static_cast<double>(levenshtein(p, g)) / static_cast<double>(g.size());
}

double edit_score(const TokenSequence& pred, const TokenSequence& gt) {
  std::size_t denom = std::max(pred.size(), gt.size());
  if (denom == 0) return 1.0;
  return 1.0 - static_cast<double>(token_edit_distance(pred, gt)) /
                   static_cast<double>(denom);
}

double bleu4(const std::vector<TokenSequence>& preds,
             const std::vector<TokenSequence>& gts) {
  if (preds.size() != gts.size() || preds.empty()) {
    throw MetricsError(MetricsError::Code::LengthMismatch,
                       "bleu4 needs equal, non-empty prediction and reference "
                       "lists");
  }
  BleuAccumulator acc;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    acc.add(preds[i], gts[i]);
  }
  return acc.value();
}

MetricReport score_pairs(
    const std::vector<std::pair<std::string, std::string>>& labeled_pairs,
    const ScoreOptions& options) {
  std::vector<PairOutcome> outcomes(labeled_pairs.size());

  unsigned workers = std::max(1u, options.workers);
  if (workers == 1 || labeled_pairs.size() < 2) {
    for (std::size_t i = 0; i < labeled_pairs.size(); ++i) {
      outcomes[i] = score_one(labeled_pairs[i].first, labeled_pairs[i].second,
                              options.norm);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= labeled_pairs.size()) return;
          outcomes[i] = score_one(labeled_pairs[i].first,
                                  labeled_pairs[i].second, options.norm);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  MetricReport report;
  Accumulator overall;
  std::map<std::string, Accumulator> by_complexity;
  std::map<std::string, Accumulator> by_repetition;
  BleuAccumulator bleu;

  for (const PairOutcome& out : outcomes) {
    switch (out.status) {
      case PairOutcome::Status::DroppedCjk:
        ++report.dropped_cjk;
        continue;
      case PairOutcome::Status::DroppedInvalidReference:
        ++report.dropped_invalid_reference;
        continue;
      case PairOutcome::Status::Unparseable:
        ++report.unparseable;
        break;
      case PairOutcome::Status::Scored:
        break;
    }
    overall.add(out.score);
    by_complexity[complexity_bucket_label(out.score.complexity_bucket)].add(out.score);
    by_repetition[repetition_bucket_label(out.score.max_repetition)].add(out.score);
    bleu.add(out.pred_tokens, out.gt_tokens);
  }

  report.n = overall.n;
  SubReport top = overall.report();
  report.exprate = top.exprate;
  report.leq1 = top.leq1;
  report.leq2 = top.leq2;
  report.mean_cer = top.mean_cer;
  report.mean_edit_score = top.mean_edit_score;
  report.bleu4 = overall.n == 0 ? 0.0 : bleu.value();
  for (const auto& [label, acc] : by_complexity) {
    report.by_complexity[label] = acc.report();
  }
  for (const auto& [label, acc] : by_repetition) {
    report.by_repetition[label] = acc.report();
  }
  return report;
}

MetricReport score_corpus(const std::string& pred_file,
                          const std::string& gt_file,
                          const ScoreOptions& options) {
  std::vector<std::string> pred_order, gt_order;
  std::map<std::string, std::string> preds = read_tsv_map(pred_file, pred_order);
  std::map<std::string, std::string> gts = read_tsv_map(gt_file, gt_order);

  std::vector<std::string> missing, extra;
  for (const std::string& key : gt_order) {
    if (!preds.count(key)) missing.push_back(key);
  }
  for (const std::string& key : pred_order) {
    if (!gts.count(key)) extra.push_back(key);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "prediction/ground-truth keys do not match;";
    auto preview = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size() && i < 8; ++i) {
        s += (i ? ", " : " ") + v[i];
      }
      if (v.size() > 8) s += ", ...";
      return s;
    };
    if (!missing.empty()) {
      msg += " missing predictions for" + preview(missing) + ";";
    }
    if (!extra.empty()) {
      msg += " unmatched prediction ids" + preview(extra) + ";";
    }
    throw MetricsError(MetricsError::Code::KeyMismatch, msg);
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(gt_order.size());
  for (const std::string& key : gt_order) {
    pairs.emplace_back(preds.at(key), gts.at(key));
  }
  return score_pairs(pairs, options);
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["dropped_cjk"] = dropped_cjk;
  j["dropped_invalid_reference"] = dropped_invalid_reference;
  j["unparseable"] = unparseable;
  j["exprate"] = exprate;
  j["leq1"] = leq1;
  j["leq2"] = leq2;
  j["mean_cer"] = mean_cer;
  j["mean_edit_score"] = mean_edit_score;
  j["bleu4"] = bleu4;
  auto bucket_json = [](const std::map<std::string, SubReport>& buckets) {
    nlohmann::ordered_json b;
    for (const auto& [label, sub] : buckets) {
      b[label] = {{"n", sub.n},
                  {"exprate", sub.exprate},
                  {"leq1", sub.leq1},
                  {"leq2", sub.leq2},
                  {"mean_cer", sub.mean_cer},
                  {"mean_edit_score", sub.mean_edit_score}};
    }
    return b;
  };
  j["by_complexity"] = bucket_json(by_complexity);
  j["by_repetition"] = bucket_json(by_repetition);
  return j.dump(2);
}

std::string MetricReport::to_text() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "pairs scored        " << n << "\n";
  out << "dropped (CJK)       " << dropped_cjk << "\n";
  out << "dropped (bad ref)   " << dropped_invalid_reference << "\n";
  out << "unparseable preds   " << unparseable << "\n";
  out << "ExpRate             " << exprate << "\n";
  out << "<=1                 " << leq1 << "\n";
  out << "<=2                 " << leq2 << "\n";
  out << "mean CER            " << mean_cer << "\n";
  out << "mean EditScore      " << mean_edit_score << "\n";
  out << "BLEU-4              " << bleu4 << "\n";
  auto print_buckets = [&](const char* title,
                           const std::map<std::string, SubReport>& buckets) {
    out << title << "\n";
    out << "  bucket      n  ExpRate     <=1     <=2     CER    Edit\n";
    for (const auto& [label, sub] : buckets) {
      out << "  " << std::left << std::setw(6) << label << std::right
          << std::setw(7) << sub.n << "  " << std::setw(7) << sub.exprate
          << " " << std::setw(7) << sub.leq1 << " " << std::setw(7) << sub.leq2
          << " " << std::setw(7) << sub.mean_cer << " " << std::setw(7)
          << sub.mean_edit_score << "\n";
    }
  };
  print_buckets("by complexity", by_complexity);
  print_buckets("by repetition", by_repetition);
  return out.str();
}

}  // namespace hmertk::metrics
