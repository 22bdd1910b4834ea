#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "hmertk/error.hpp"
#include "hmertk/normalize.hpp"
#include "hmertk/token.hpp"

namespace hmertk::metrics {

class MetricsError : public Error {
 public:
  enum class Code { EmptyReference, LengthMismatch, KeyMismatch };

  MetricsError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Unit-cost token-level Levenshtein distance. Kept independent of
// editops::align on purpose; the two routes cross-check each other in tests.
std::size_t token_edit_distance(const TokenSequence& pred, const TokenSequence& gt);

// Character-level Levenshtein over the two strings with token-separating
// spaces removed, normalized by the reference character count.
// Throws MetricsError::EmptyReference when gt has no characters.
double cer(const std::string& pred, const std::string& gt);

// 1 - token_edit_distance / max(|pred|, |gt|); 1 when both are empty.
double edit_score(const TokenSequence& pred, const TokenSequence& gt);

// Corpus-level BLEU with uniform weights over 1..4-grams, brevity penalty,
// and add-epsilon smoothing (1e-9) for orders with zero matches.
double bleu4(const std::vector<TokenSequence>& preds,
             const std::vector<TokenSequence>& gts);

struct PairScore {
  bool exact = false;
  std::size_t token_dist = 0;
  double cer = 0.0;
  double edit_score = 0.0;
  std::size_t complexity_bucket = 0;  // gt structural complexity
  std::size_t max_repetition = 0;     // gt max symbol repetition
};

struct SubReport {
  std::size_t n = 0;
  double exprate = 0.0;
  double leq1 = 0.0;
  double leq2 = 0.0;
  double mean_cer = 0.0;
  double mean_edit_score = 0.0;
};

struct MetricReport {
  std::size_t n = 0;             // scored pairs
  std::size_t dropped_cjk = 0;   // prediction contained CJK, excluded
  std::size_t dropped_invalid_reference = 0;
  std::size_t unparseable = 0;   // predictions scored as maximally wrong
  double exprate = 0.0;
  double leq1 = 0.0;
  double leq2 = 0.0;
  double mean_cer = 0.0;
  double mean_edit_score = 0.0;
  double bleu4 = 0.0;
  std::map<std::string, SubReport> by_complexity;  // N0, N1, N2, N3 (>= 3)
  std::map<std::string, SubReport> by_repetition;  // R0..R4, R5+

  std::string to_json() const;
  std::string to_text() const;
};

struct ScoreOptions {
  NormalizationConfig norm = NormalizationConfig::defaults();
  unsigned workers = 1;
};

// Scores a prediction TSV against a ground-truth TSV ("image_ref<TAB>latex",
// matched by image_ref). Both sides run the training-time clean + tokenize +
// normalize pipeline before any metric. Predictions with CJK content are
// dropped and counted; otherwise-unparseable predictions score as maximally
// wrong. Throws MetricsError::KeyMismatch when the key sets differ.
MetricReport score_corpus(const std::string& pred_file,
                          const std::string& gt_file,
                          const ScoreOptions& options = {});

// In-memory variant; pairs are (pred raw label, gt raw label) by key.
MetricReport score_pairs(
    const std::vector<std::pair<std::string, std::string>>& labeled_pairs,
    const ScoreOptions& options = {});

}  // namespace hmertk::metrics
