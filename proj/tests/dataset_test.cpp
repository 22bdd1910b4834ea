#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hmertk/config.hpp"
#include "hmertk/dataset.hpp"
#include "hmertk/slt.hpp"
#include "hmertk/tokenizer.hpp"
#include "hmertk/validate.hpp"
#include "test_util.hpp"

using namespace hmertk;
using dataset::Task;

namespace {

const std::string kWorkedExpr =
    "| \\frac { a x _ { 0 } + b y _ { 0 } + c } "
    "{ \\sqrt { a ^ { 2 } + b ^ { 2 } } } |";
const std::string kWorkedPred =
    "| \\frac { a x _ { 0 } + b y _ { 0 } + c } "
    "{ \\sqrt { d ^ { 2 } + b ^ { 2 } } } |";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() /
          ("hmertk_test_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

const std::set<Task> kAllTasks = {Task::Vanilla, Task::TreeCot, Task::ErrorDetect,
                                  Task::ErrorCorrect, Task::SymbolCount};

}  // namespace

TEST_CASE("ingest_tsv reads rows in order and validates shape") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path("captions.tsv"));
    out << "img_001\ta + b\n\nimg_002\tx ^ { 2 }\n";
  }
  auto records = dataset::ingest_tsv(tmp.path("captions.tsv"));
  REQUIRE(records.size() == 2);
  CHECK(records[0].image_ref == "img_001");
  CHECK(records[0].label == "a + b");
  CHECK(records[1].image_ref == "img_002");

  {
    std::ofstream out(tmp.path("bad.tsv"));
    out << "img_001 without tab\n";
  }
  CHECK_THROWS_AS(dataset::ingest_tsv(tmp.path("bad.tsv")), dataset::IngestError);
  CHECK_THROWS_AS(dataset::ingest_tsv(tmp.path("missing.tsv")),
                  dataset::IngestError);
}

TEST_CASE("preprocess maps failures to ledger reasons") {
  dataset::PreprocessOptions opts;
  auto reason_of = [&](const std::string& label) {
    auto outcome = dataset::preprocess({"img", label}, opts);
    REQUIRE(std::holds_alternative<dataset::DropReason>(outcome));
    return std::get<dataset::DropReason>(outcome);
  };
  auto kept = [&](const std::string& label) {
    auto outcome = dataset::preprocess({"img", label}, opts);
    REQUIRE(std::holds_alternative<TokenSequence>(outcome));
    return detokenize(std::get<TokenSequence>(outcome));
  };

  CHECK(kept("H^I") == "H ^ { I }");
  CHECK(kept("\\frac a^2 2") == "\\frac { a ^ { 2 } } { 2 }");
  CHECK(reason_of("a 中 b") == dataset::DropReason::CjkContent);
  CHECK(reason_of("{ a") == dataset::DropReason::BracketsInvalid);
  CHECK(reason_of("a ^") == dataset::DropReason::BracketsInvalid);
  CHECK(reason_of("   ") == dataset::DropReason::TokenizeFailure);
  CHECK(reason_of("\\underline { \\quad }") == dataset::DropReason::CleaningEmptied);
  CHECK(reason_of("{ }") == dataset::DropReason::CleaningEmptied);
  CHECK(reason_of("\\frac a") == dataset::DropReason::NormalizeFailure);
  CHECK(reason_of("\\notarealmacro x") == dataset::DropReason::TokenizeFailure);

  dataset::PreprocessOptions keep;
  keep.keep_unknown_words = true;
  auto outcome = dataset::preprocess({"img", "\\notarealmacro x"}, keep);
  CHECK(std::holds_alternative<TokenSequence>(outcome));
}

TEST_CASE("emit_samples: worked-example golden answers for all five tasks") {
  dataset::RawRecord rec{"crohme/18_em_0.jpg", kWorkedExpr};
  TokenSequence seq = tokenize(kWorkedExpr);
  TokenSequence pred = tokenize(kWorkedPred);

  auto samples = dataset::emit_samples(rec, seq, kAllTasks, {pred});
  REQUIRE(samples.size() == 5);

  std::map<Task, dataset::TaskSample> by_task;
  for (const auto& s : samples) by_task[s.task] = s;

  const auto& vanilla = by_task.at(Task::Vanilla);
  CHECK(vanilla.system == "You are a helpful assistant.");
  CHECK(vanilla.prompt ==
        "I have an image of a handwritten mathematical expression. Please "
        "write out the expression of the formula in the image using LaTeX "
        "format.");
  CHECK(vanilla.answer == kWorkedExpr);
  CHECK(vanilla.id == "crohme/18_em_0.jpg#vanilla#0");

  const auto& tree = by_task.at(Task::TreeCot);
  CHECK(tree.prompt ==
        "I have an image of a handwritten mathematical expression. Please "
        "generate the abstract syntax tree (AST) of the formula in the image, "
        "and then provide its corresponding LaTeX format.");
  CHECK(tree.answer == slt::serialize(slt::build(seq)));
  std::size_t last_nl = tree.answer.rfind('\n');
  CHECK(tree.answer.substr(last_nl + 1) == kWorkedExpr);

  const auto& counting = by_task.at(Task::SymbolCount);
  CHECK(counting.prompt ==
        "I have an image of a handwritten mathematical expression. Please "
        "identify and count each distinct visible mathematical symbol in the "
        "image, and then provide its corresponding LaTeX format.");
  CHECK(counting.answer ==
        "|: 2, \\frac: 1, a: 2, x: 1, _: 2, 0: 2, +: 3, b: 2, y: 1, c: 1, "
        "\\sqrt: 1, ^: 2, 2: 2\n" +
            kWorkedExpr);

  const auto& detect = by_task.at(Task::ErrorDetect);
  CHECK(detect.prompt ==
        "I have an image of a handwritten mathematical expression and its OCR "
        "recognition result. Please help me to detect possible errors in the "
        "recognition result and mark the places where errors occur with "
        "<error_start> <error_end> and <deleted>.\nerroneous formula: " +
            kWorkedPred + "\nMarked formula: ");
  CHECK(detect.answer ==
        "| \\frac { a x _ { 0 } + b y _ { 0 } + c } { \\sqrt { <error_start> "
        "d <error_end> ^ { 2 } + b ^ { 2 } } } |");

  const auto& correct = by_task.at(Task::ErrorCorrect);
  CHECK(correct.prompt ==
        "I have an image of a handwritten mathematical expression and a "
        "predicted formula with error tags, correct the formula by modifying "
        "the parts marked with <error_start> and <error_end> and inserting "
        "content where <deleted> are present. Output the modifications in a "
        "single string using the following format: REPLACE:old -> new for "
        "errors to be replaced. INSERT:content after the position for missing "
        "content. DELETE:to_delete for parts to be removed.\nMarked formula: " +
            detect.answer + "\nCorrection log: ");
  CHECK(correct.answer == "REPLACE:d -> a\n" + kWorkedExpr);
}

TEST_CASE("emit_samples: multiplicity rules") {
  dataset::RawRecord rec{"img", "a + b"};
  TokenSequence seq = tokenize("a + b");

  CHECK(dataset::emit_samples(rec, seq, {Task::Vanilla}).size() == 1);
  CHECK(dataset::emit_samples(rec, seq, kAllTasks).size() == 3);  // no EDL source

  // Two distinct predictions; the second has two separated error spans
  // (substitution at the front, stray token at the end) -> two rounds.
  std::vector<TokenSequence> preds = {
      tokenize("a - b"), tokenize("x + b q"), tokenize("a - b"),  // dup dropped
      seq,                                                        // equal dropped
  };
  auto samples = dataset::emit_samples(rec, seq, kAllTasks, preds);
  std::size_t detect = 0, correct = 0;
  for (const auto& s : samples) {
    if (s.task == Task::ErrorDetect) ++detect;
    if (s.task == Task::ErrorCorrect) ++correct;
  }
  CHECK(detect == 2);
  CHECK(correct == 3);
  CHECK(samples.size() == 3 + 2 + 3);
}

TEST_CASE("write_jsonl/read_jsonl round-trip") {
  TempDir tmp;
  CHECK(dataset::write_jsonl({}, tmp.path("empty.jsonl")) == 0);
  CHECK(slurp(tmp.path("empty.jsonl")).empty());

  testutil::ExpressionGenerator gen(1009);
  std::vector<dataset::TaskSample> samples;
  dataset::PreprocessOptions opts;
  int img = 0;
  while (samples.size() < 100) {
    std::string expr = gen.expression();
    dataset::RawRecord rec{"img_" + std::to_string(img++), expr};
    auto outcome = dataset::preprocess(rec, opts);
    if (!std::holds_alternative<TokenSequence>(outcome)) continue;
    auto emitted = dataset::emit_samples(
        rec, std::get<TokenSequence>(outcome),
        {Task::Vanilla, Task::TreeCot, Task::SymbolCount});
    samples.insert(samples.end(), emitted.begin(), emitted.end());
  }
  samples.resize(100);

  CHECK(dataset::write_jsonl(samples, tmp.path("samples.jsonl")) == 100);
  std::vector<dataset::TaskSample> back =
      dataset::read_jsonl(tmp.path("samples.jsonl"));
  CHECK(back == samples);

  std::string text = slurp(tmp.path("samples.jsonl"));
  CHECK(std::count(text.begin(), text.end(), '\n') == 100);
  // Stable field order in every line.
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    CHECK(line.rfind("{\"id\":", 0) == 0);
    CHECK(line.find("\"image\":") < line.find("\"task\":"));
    CHECK(line.find("\"task\":") < line.find("\"messages\":"));
    CHECK(line.find("\"system\"") < line.find("\"user\""));
    CHECK(line.find("\"user\"") < line.find("\"assistant\""));
  }
}

TEST_CASE("ledger arithmetic") {
  dataset::FilterLedger ledger;
  ledger.kept = 7;
  ledger.add(dataset::DropReason::CjkContent);
  ledger.add(dataset::DropReason::CjkContent);
  ledger.add(dataset::DropReason::BracketsInvalid);
  CHECK(ledger.total() == 10);

  dataset::FilterLedger other;
  other.kept = 3;
  other.add(dataset::DropReason::NormalizeFailure);
  ledger.merge(other);
  CHECK(ledger.kept == 10);
  CHECK(ledger.total() == 14);
  CHECK(ledger.to_json().find("\"CjkContent\": 2") != std::string::npos);
}

TEST_CASE("build_dataset: ledger conservation, determinism, sidecar") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path("captions.tsv"));
    out << "img_0\ta + b\n";
    out << "img_1\t中文 label\n";            // CJK
    out << "img_2\t{ a\n";                   // unbalanced
    out << "img_3\tx ^\n";                   // dangling script
    out << "img_4\t\\frac { x } { y }\n";
    out << "img_5\tH^I\n";
  }
  {
    std::ofstream out(tmp.path("preds.jsonl"));
    out << R"({"image": "img_0", "ground_truth": "a + b", "predictions": ["a - b", "a + b", "a  +  b"]})"
        << "\n";
    out << R"({"image": "img_4", "ground_truth": "\\frac { x } { y }", "predictions": ["\\frac { x } { z }"]})"
        << "\n";
  }

  dataset::BuildOptions opts;
  opts.input_tsv = tmp.path("captions.tsv");
  opts.output_jsonl = tmp.path("out.jsonl");
  opts.sidecar_path = tmp.path("preds.jsonl");

  dataset::BuildReport report = dataset::build_dataset(opts);
  CHECK(report.ledger.kept == 3);
  CHECK(report.ledger.total() == 6);
  CHECK(report.ledger.counts.at(dataset::DropReason::CjkContent) == 1);
  CHECK(report.ledger.counts.at(dataset::DropReason::BracketsInvalid) == 2);

  // 3 kept records x 3 single samples, plus img_0: 1 detect + 1 correct
  // (one-span prediction, duplicates/equal dropped), plus img_4: 1 + 1.
  CHECK(report.samples_written == 9 + 4);

  std::string first = slurp(tmp.path("out.jsonl"));
  CHECK(std::filesystem::exists(tmp.path("out.jsonl.ledger.json")));

  dataset::BuildOptions parallel = opts;
  parallel.output_jsonl = tmp.path("out2.jsonl");
  parallel.workers = 4;
  dataset::build_dataset(parallel);
  CHECK(slurp(tmp.path("out2.jsonl")) == first);
}

TEST_CASE("emitted answers end with the record's normalized expression") {
  // Holds for every task except detection, whose answer is the marked
  // prediction by design.
  testutil::ExpressionGenerator gen(60601);
  dataset::PreprocessOptions opts;
  editops::InjectionConfig inj = editops::InjectionConfig::defaults();
  int records = 0;
  for (int i = 0; i < 120 && records < 60; ++i) {
    dataset::RawRecord rec{"img_" + std::to_string(i), gen.expression()};
    auto outcome = dataset::preprocess(rec, opts);
    if (!std::holds_alternative<TokenSequence>(outcome)) continue;
    ++records;
    const TokenSequence& seq = std::get<TokenSequence>(outcome);
    inj.seed = 1000 + static_cast<std::uint64_t>(i);
    std::vector<TokenSequence> preds = {
        editops::inject_errors(seq, inj).corrupted};
    for (const auto& s : dataset::emit_samples(rec, seq, kAllTasks, preds)) {
      if (s.task == Task::ErrorDetect) continue;
      std::string_view answer = s.answer;
      std::size_t nl = answer.rfind('\n');
      std::string last(nl == std::string::npos ? answer
                                               : answer.substr(nl + 1));
      CAPTURE(s.id);
      CHECK(tokenize(last) == seq);
    }
  }
  CHECK(records == 60);
}

TEST_CASE("shipped data files stay in sync with the built-in defaults") {
  std::ifstream vocab_file(std::string(HMERTK_DATA_DIR) + "/latex_vocab.txt");
  REQUIRE(vocab_file.good());
  std::string word;
  std::size_t listed = 0;
  while (std::getline(vocab_file, word)) {
    if (word.empty() || word.front() == '#') continue;
    ++listed;
    CAPTURE(word);
    CHECK(Vocabulary::builtin().contains(word));
  }
  CHECK(listed == Vocabulary::builtin().size());

  NormalizationConfig norm =
      load_normalization_config(std::string(HMERTK_DATA_DIR) + "/normalization.conf");
  NormalizationConfig defaults = NormalizationConfig::defaults();
  CHECK(norm.alias_map == defaults.alias_map);
  CHECK(norm.strip_styles == defaults.strip_styles);
  CHECK(norm.remove_tokens == defaults.remove_tokens);

  editops::InjectionConfig inj =
      load_injection_config(std::string(HMERTK_DATA_DIR) + "/injector.conf");
  editops::InjectionConfig inj_defaults = editops::InjectionConfig::defaults();
  CHECK(inj.confusion_pairs == inj_defaults.confusion_pairs);
  CHECK(inj.p_substitute == inj_defaults.p_substitute);
  CHECK(inj.max_edits == inj_defaults.max_edits);
}

TEST_CASE("build_dataset: injection fallback is seeded and deterministic") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path("captions.tsv"));
    for (int i = 0; i < 20; ++i) {
      out << "img_" << i << "\t2 x + " << (i % 10) << "\n";
    }
  }
  dataset::BuildOptions opts;
  opts.input_tsv = tmp.path("captions.tsv");
  opts.output_jsonl = tmp.path("a.jsonl");
  opts.injection = editops::InjectionConfig::defaults();
  opts.injection->seed = 31337;

  dataset::BuildReport report = dataset::build_dataset(opts);
  CHECK(report.ledger.kept == 20);
  CHECK(report.samples_written >= 20 * 5);  // every record yields >= 1 EDL pair

  dataset::BuildOptions again = opts;
  again.output_jsonl = tmp.path("b.jsonl");
  again.workers = 3;
  dataset::build_dataset(again);
  CHECK(slurp(tmp.path("a.jsonl")) == slurp(tmp.path("b.jsonl")));

  dataset::BuildOptions reseeded = opts;
  reseeded.output_jsonl = tmp.path("c.jsonl");
  reseeded.injection->seed = 99;
  dataset::build_dataset(reseeded);
  CHECK(slurp(tmp.path("a.jsonl")) != slurp(tmp.path("c.jsonl")));
}
