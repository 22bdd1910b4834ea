#include "hmertk/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hmertk/slt.hpp"
#include "hmertk/tokenizer.hpp"
#include "hmertk/validate.hpp"

namespace hmertk::dataset {

namespace {

constexpr std::string_view kVanillaPrompt =
    "I have an image of a handwritten mathematical expression. Please write "
    "out the expression of the formula in the image using LaTeX format.";

constexpr std::string_view kTreeCotPrompt =
    "I have an image of a handwritten mathematical expression. Please "
    "generate the abstract syntax tree (AST) of the formula in the image, and "
    "then provide its corresponding LaTeX format.";

constexpr std::string_view kSymbolCountPrompt =
    "I have an image of a handwritten mathematical expression. Please "
    "identify and count each distinct visible mathematical symbol in the "
    "image, and then provide its corresponding LaTeX format.";

constexpr std::string_view kDetectionPromptHead =
    "I have an image of a handwritten mathematical expression and its OCR "
    "recognition result. Please help me to detect possible errors in the "
    "recognition result and mark the places where errors occur with "
    "<error_start> <error_end> and <deleted>.";

constexpr std::string_view kCorrectionPromptHead =
    "I have an image of a handwritten mathematical expression and a predicted "
    "formula with error tags, correct the formula by modifying the parts "
    "marked with <error_start> and <error_end> and inserting content where "
    "<deleted> are present. Output the modifications in a single string using "
    "the following format: REPLACE:old -> new for errors to be replaced. "
    "INSERT:content after the position for missing content. DELETE:to_delete "
    "for parts to be removed.";

// splitmix64: decorrelates per-record seeds from a single base seed so the
// output is independent of worker scheduling.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

nlohmann::ordered_json sample_to_json(const TaskSample& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["image"] = s.image_ref;
  j["task"] = std::string(task_name(s.task));
  j["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", s.system}},
       {{"role", "user"}, {"content", s.prompt}},
       {{"role", "assistant"}, {"content", s.answer}}});
  return j;
}

}  // namespace

std::vector<RawRecord> ingest_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestError(IngestError::Code::IoFailure, "cannot open " + path);
  }
  std::vector<RawRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IngestError(IngestError::Code::MalformedRow,
                        path + ": row " + std::to_string(lineno) +
                            " has no TAB separator");
    }
    records.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  if (in.bad()) {
    throw IngestError(IngestError::Code::IoFailure, "read error on " + path);
  }
  return records;
}

std::string_view drop_reason_name(DropReason reason) {
  switch (reason) {
    case DropReason::CjkContent: return "CjkContent";
    case DropReason::CleaningEmptied: return "CleaningEmptied";
    case DropReason::TokenizeFailure: return "TokenizeFailure";
    case DropReason::NormalizeFailure: return "NormalizeFailure";
    case DropReason::BracketsInvalid: return "BracketsInvalid";
  }
  return "Unknown";
}

std::size_t FilterLedger::total() const {
  std::size_t sum = kept;
  for (const auto& [reason, count] : counts) sum += count;
  return sum;
}

void FilterLedger::merge(const FilterLedger& other) {
  kept += other.kept;
  for (const auto& [reason, count] : other.counts) counts[reason] += count;
}

std::string FilterLedger::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total();
  j["kept"] = kept;
  nlohmann::ordered_json deleted;
  for (DropReason reason :
       {DropReason::CjkContent, DropReason::CleaningEmptied,
        DropReason::TokenizeFailure, DropReason::NormalizeFailure,
        DropReason::BracketsInvalid}) {
    auto it = counts.find(reason);
    deleted[std::string(drop_reason_name(reason))] =
        it == counts.end() ? 0 : it->second;
  }
  j["deleted"] = deleted;
  return j.dump(2);
}

std::variant<TokenSequence, DropReason> preprocess(
    const RawRecord& rec, const PreprocessOptions& options) {
  TokenSequence tokens;
  try {
    tokens = tokenize(rec.label);
  } catch (const TokenizeError& e) {
    return e.code() == TokenizeError::Code::CjkContent
               ? DropReason::CjkContent
               : DropReason::TokenizeFailure;
  }

  tokens = clean(tokens, options.norm);

  Vocabulary vocab = Vocabulary::builtin();
  vocab.add_all(options.norm.extra_vocabulary);
  ValidationReport report = validate(tokens, vocab);
  if (!report.ok) {
    for (const Issue& issue : report.issues) {
      if (issue.code == IssueCode::EmptyInput) return DropReason::CleaningEmptied;
      if (issue.code == IssueCode::UnbalancedBraces ||
          issue.code == IssueCode::DanglingScript) {
        return DropReason::BracketsInvalid;
      }
    }
    // Only unknown control words remain.
    if (!options.keep_unknown_words) return DropReason::TokenizeFailure;
  }

  TokenSequence normalized;
  try {
    normalized = normalize(tokens, options.norm);
  } catch (const NormalizeError&) {
    return DropReason::NormalizeFailure;
  }

  ValidationReport post = validate(normalized, vocab);
  for (const Issue& issue : post.issues) {
    if (issue.code != IssueCode::UnknownControlWord) {
      return DropReason::NormalizeFailure;
    }
  }
  return normalized;
}

std::string_view task_name(Task task) {
  switch (task) {
    case Task::Vanilla: return "vanilla";
    case Task::TreeCot: return "tree_cot";
    case Task::ErrorDetect: return "error_detect";
    case Task::ErrorCorrect: return "error_correct";
    case Task::SymbolCount: return "symbol_count";
  }
  return "vanilla";
}

std::optional<Task> task_from_name(std::string_view name) {
  if (name == "vanilla") return Task::Vanilla;
  if (name == "tree_cot") return Task::TreeCot;
  if (name == "error_detect") return Task::ErrorDetect;
  if (name == "error_correct") return Task::ErrorCorrect;
  if (name == "symbol_count") return Task::SymbolCount;
  return std::nullopt;
}

std::string_view fixed_prompt(Task task) {
  switch (task) {
    case Task::Vanilla: return kVanillaPrompt;
    case Task::TreeCot: return kTreeCotPrompt;
    case Task::SymbolCount: return kSymbolCountPrompt;
    case Task::ErrorDetect:
    case Task::ErrorCorrect: break;
  }
  throw Error("task has no fixed prompt; use detection_prompt/correction_prompt");
}

std::string detection_prompt(const std::string& erroneous_formula) {
  std::string p(kDetectionPromptHead);
  p += "\nerroneous formula: ";
  p += erroneous_formula;
  p += "\nMarked formula: ";
  return p;
}

std::string correction_prompt(const std::string& marked_formula) {
  std::string p(kCorrectionPromptHead);
  p += "\nMarked formula: ";
  p += marked_formula;
  p += "\nCorrection log: ";
  return p;
}

std::vector<TaskSample> emit_samples(
    const RawRecord& rec, const TokenSequence& seq, const std::set<Task>& tasks,
    const std::vector<TokenSequence>& erroneous_predictions) {
  std::vector<TaskSample> samples;
  const std::string latex = detokenize(seq);

  auto make = [&](Task task, std::size_t ordinal, std::string prompt,
                  std::string answer) {
    TaskSample s;
    s.id = rec.image_ref + "#" + std::string(task_name(task)) + "#" +
           std::to_string(ordinal);
    s.task = task;
    s.image_ref = rec.image_ref;
    s.prompt = std::move(prompt);
    s.answer = std::move(answer);
    samples.push_back(std::move(s));
  };

  if (tasks.count(Task::Vanilla)) {
    make(Task::Vanilla, 0, std::string(kVanillaPrompt), latex);
  }
  if (tasks.count(Task::TreeCot)) {
    make(Task::TreeCot, 0, std::string(kTreeCotPrompt),
         slt::serialize(slt::build(seq)));
  }
  if (tasks.count(Task::SymbolCount)) {
    make(Task::SymbolCount, 0, std::string(kSymbolCountPrompt),
         slt::count_symbols(seq).to_string() + "\n" + latex);
  }

  if (!tasks.count(Task::ErrorDetect) && !tasks.count(Task::ErrorCorrect)) {
    return samples;
  }

  std::vector<TokenSequence> distinct;
  for (const TokenSequence& pred : erroneous_predictions) {
    if (pred == seq) continue;
    if (std::find(distinct.begin(), distinct.end(), pred) != distinct.end())
      continue;
    distinct.push_back(pred);
  }

  std::size_t detect_ordinal = 0;
  std::size_t correct_ordinal = 0;
  for (const TokenSequence& pred : distinct) {
    editops::EditScript script = editops::align(pred, seq);
    if (tasks.count(Task::ErrorDetect)) {
      editops::MarkedExpression marked = editops::mark_errors(pred, script);
      make(Task::ErrorDetect, detect_ordinal++, detection_prompt(detokenize(pred)),
           marked.text);
    }
    if (tasks.count(Task::ErrorCorrect)) {
      for (const editops::CorrectionRound& round :
           editops::correction_rounds(pred, seq)) {
        make(Task::ErrorCorrect, correct_ordinal++,
             correction_prompt(round.marked.text),
             round.log_line + "\n" + detokenize(round.corrected));
      }
    }
  }
  return samples;
}

std::size_t write_jsonl(const std::vector<TaskSample>& samples,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IngestError(IngestError::Code::IoFailure, "cannot write " + path);
  }
  for (const TaskSample& s : samples) {
    out << sample_to_json(s).dump() << "\n";
  }
  out.flush();
  if (!out) {
    throw IngestError(IngestError::Code::IoFailure, "write error on " + path);
  }
  return samples.size();
}

std::vector<TaskSample> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestError(IngestError::Code::IoFailure, "cannot open " + path);
  }
  std::vector<TaskSample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(IngestError::Code::MalformedRow,
                        path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    TaskSample s;
    s.id = j.at("id").get<std::string>();
    s.image_ref = j.at("image").get<std::string>();
    auto task = task_from_name(j.at("task").get<std::string>());
    if (!task) {
      throw IngestError(IngestError::Code::MalformedRow,
                        path + ":" + std::to_string(lineno) + ": unknown task");
    }
    s.task = *task;
    const auto& messages = j.at("messages");
    for (const auto& msg : messages) {
      std::string role = msg.at("role").get<std::string>();
      std::string content = msg.at("content").get<std::string>();
      if (role == "system") s.system = content;
      if (role == "user") s.prompt = content;
      if (role == "assistant") s.answer = content;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::map<std::string, std::vector<std::string>> load_prediction_sidecar(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestError(IngestError::Code::IoFailure, "cannot open " + path);
  }
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IngestError(IngestError::Code::MalformedRow,
                        path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    std::string image = j.at("image").get<std::string>();
    auto& bucket = out[image];
    for (const auto& p : j.at("predictions")) {
      bucket.push_back(p.get<std::string>());
    }
  }
  return out;
}

BuildReport build_dataset(const BuildOptions& options) {
  std::vector<RawRecord> records = ingest_tsv(options.input_tsv);

  std::map<std::string, std::vector<std::string>> sidecar;
  if (options.sidecar_path) {
    sidecar = load_prediction_sidecar(*options.sidecar_path);
  }

  struct RecordResult {
    FilterLedger ledger;
    std::vector<std::string> lines;
  };
  std::vector<RecordResult> results(records.size());

  auto process = [&](std::size_t index) {
    RecordResult& result = results[index];
    const RawRecord& rec = records[index];
    auto outcome = preprocess(rec, options.pre);
    if (std::holds_alternative<DropReason>(outcome)) {
      result.ledger.add(std::get<DropReason>(outcome));
      return;
    }
    const TokenSequence& seq = std::get<TokenSequence>(outcome);
    result.ledger.kept = 1;

    std::vector<TokenSequence> predictions;
    if (options.sidecar_path) {
      auto it = sidecar.find(rec.image_ref);
      if (it != sidecar.end()) {
        for (const std::string& raw : it->second) {
          try {
            predictions.push_back(
                normalize(clean(tokenize(raw), options.pre.norm), options.pre.norm));
          } catch (const Error&) {
            // Unusable prediction; contributes no EDL sample.
          }
        }
      }
    } else if (options.injection) {
      editops::InjectionConfig cfg = *options.injection;
      for (std::size_t k = 0; k < options.injections_per_record; ++k) {
        cfg.seed = mix_seed(options.injection->seed, index * 8191 + k);
        try {
          predictions.push_back(editops::inject_errors(seq, cfg).corrupted);
        } catch (const editops::EditError&) {
          // Sequence not corruptible under this config.
        }
      }
    }

    for (const TaskSample& s :
         emit_samples(rec, seq, options.tasks, predictions)) {
      result.lines.push_back(sample_to_json(s).dump());
    }
  };

  unsigned workers = std::max(1u, options.workers);
  if (workers == 1 || records.size() < 2) {
    for (std::size_t i = 0; i < records.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= records.size()) return;
          process(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  BuildReport report;
  std::ofstream out(options.output_jsonl, std::ios::binary);
  if (!out) {
    throw IngestError(IngestError::Code::IoFailure,
                      "cannot write " + options.output_jsonl);
  }
  for (const RecordResult& result : results) {
    report.ledger.merge(result.ledger);
    for (const std::string& line : result.lines) {
      out << line << "\n";
      ++report.samples_written;
    }
  }
  out.flush();
  if (!out) {
    throw IngestError(IngestError::Code::IoFailure,
                      "write error on " + options.output_jsonl);
  }

  std::string ledger_path = options.ledger_path.empty()
                                ? options.output_jsonl + ".ledger.json"
                                : options.ledger_path;
  std::ofstream ledger_out(ledger_path, std::ios::binary);
  if (!ledger_out) {
    throw IngestError(IngestError::Code::IoFailure, "cannot write " + ledger_path);
  }
  ledger_out << report.ledger.to_json() << "\n";
  return report;
}

}  // namespace hmertk::dataset
