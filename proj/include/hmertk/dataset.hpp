#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "hmertk/editops.hpp"
#include "hmertk/error.hpp"
#include "hmertk/normalize.hpp"
#include "hmertk/token.hpp"

namespace hmertk::dataset {

class IngestError : public Error {
 public:
  enum class Code { IoFailure, MalformedRow };

  IngestError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

struct RawRecord {
  std::string image_ref;
  std::string label;
};

// Reads "image_ref<TAB>label" rows, skipping blank lines, order preserved.
// Throws IngestError: IoFailure on unreadable files, MalformedRow (with the
// row number) when a row has no TAB.
std::vector<RawRecord> ingest_tsv(const std::string& path);

enum class DropReason {
  CjkContent,
  CleaningEmptied,
  TokenizeFailure,
  NormalizeFailure,
  BracketsInvalid,
};

std::string_view drop_reason_name(DropReason reason);

struct FilterLedger {
  std::map<DropReason, std::size_t> counts;
  std::size_t kept = 0;

  std::size_t total() const;
  void add(DropReason reason) { ++counts[reason]; }
  void merge(const FilterLedger& other);
  std::string to_json() const;
};

struct PreprocessOptions {
  NormalizationConfig norm = NormalizationConfig::defaults();
  // Keep records whose only validation issue is an out-of-vocabulary control
  // word. Off by default: the pipeline drops what it cannot vouch for.
  bool keep_unknown_words = false;
};

// tokenize -> clean -> validate -> normalize -> validate; the first failure
// short-circuits with its deletion reason. Never throws for data problems.
std::variant<TokenSequence, DropReason> preprocess(const RawRecord& rec,
                                                   const PreprocessOptions& options);

enum class Task { Vanilla, TreeCot, ErrorDetect, ErrorCorrect, SymbolCount };

std::string_view task_name(Task task);
std::optional<Task> task_from_name(std::string_view name);

inline constexpr std::string_view kSystemPrompt = "You are a helpful assistant.";

// The fixed user prompt for Vanilla / TreeCot / SymbolCount; detection and
// correction prompts carry per-sample slots, see detection_prompt /
// correction_prompt.
std::string_view fixed_prompt(Task task);
std::string detection_prompt(const std::string& erroneous_formula);
std::string correction_prompt(const std::string& marked_formula);

struct TaskSample {
  std::string id;  // "<image_ref>#<task>#<ordinal>"
  Task task = Task::Vanilla;
  std::string image_ref;
  std::string system{kSystemPrompt};
  std::string prompt;
  std::string answer;

  bool operator==(const TaskSample&) const = default;
};

// Emits the selected task samples for one record. Vanilla / TreeCot /
// SymbolCount yield one sample each; ErrorDetect yields one per distinct
// erroneous prediction, ErrorCorrect one per error span per prediction.
// Predictions equal to the ground truth and duplicates are discarded.
std::vector<TaskSample> emit_samples(
    const RawRecord& rec, const TokenSequence& seq, const std::set<Task>& tasks,
    const std::vector<TokenSequence>& erroneous_predictions = {});

// One JSON object per line:
//   {"id", "image", "task", "messages": [system, user, assistant]}
// with stable field order. Returns the number of samples written.
std::size_t write_jsonl(const std::vector<TaskSample>& samples,
                        const std::string& path);

std::vector<TaskSample> read_jsonl(const std::string& path);

// Sidecar of externally produced predictions:
//   {"image": ..., "ground_truth": ..., "predictions": [...]}  per line.
std::map<std::string, std::vector<std::string>> load_prediction_sidecar(
    const std::string& path);

struct BuildOptions {
  std::string input_tsv;
  std::string output_jsonl;
  std::string ledger_path;  // defaults to "<output_jsonl>.ledger.json"
  std::set<Task> tasks = {Task::Vanilla, Task::TreeCot, Task::ErrorDetect,
                          Task::ErrorCorrect, Task::SymbolCount};
  PreprocessOptions pre;
  // Error source: sidecar predictions when given, otherwise seeded injection
  // (when injection is set). Records without predictions yield no EDL samples.
  std::optional<std::string> sidecar_path;
  std::optional<editops::InjectionConfig> injection;
  std::size_t injections_per_record = 1;
  unsigned workers = 1;
};

struct BuildReport {
  FilterLedger ledger;
  std::size_t samples_written = 0;
};

// Full pipeline: ingest, preprocess with ledger, emit samples, write JSONL
// (+ ledger JSON). Deterministic: identical inputs and seed give a
// byte-identical output file regardless of worker count.
BuildReport build_dataset(const BuildOptions& options);

}  // namespace hmertk::dataset
