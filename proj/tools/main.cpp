// hmertk: command-line front end for the HMER data toolkit.
//
// Single-expression subcommands (tokenize, normalize, validate, tree, parse,
// count) read stdin or --input and write stdout or --output, one expression
// per line (parse reads whole tree blocks separated by blank lines). File
// subcommands (diff, inject, build-dataset, score, stats) work on TSV/JSONL.
//
// Exit status: 0 success, 1 validation/scoring failure, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "hmertk/config.hpp"
#include "hmertk/dataset.hpp"
#include "hmertk/editops.hpp"
#include "hmertk/metrics.hpp"
#include "hmertk/normalize.hpp"
#include "hmertk/slt.hpp"
#include "hmertk/tokenizer.hpp"
#include "hmertk/validate.hpp"

using namespace hmertk;

namespace {

constexpr const char* kConfigEnvVar = "HMERTK_CONFIG";

struct IoOptions {
  std::string input;   // empty = stdin
  std::string output;  // empty = stdout
};

std::vector<std::string> read_lines(const IoOptions& io) {
  std::vector<std::string> lines;
  auto drain = [&](std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  };
  if (io.input.empty()) {
    drain(std::cin);
  } else {
    std::ifstream in(io.input);
    if (!in) throw IoError("cannot open " + io.input);
    drain(in);
  }
  return lines;
}

void write_text(const IoOptions& io, const std::string& text) {
  if (io.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(io.output, std::ios::binary);
  if (!out) throw IoError("cannot write " + io.output);
  out << text;
}

NormalizationConfig resolve_norm_config(const std::string& flag_path) {
  if (!flag_path.empty()) return load_normalization_config(flag_path);
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
    return load_normalization_config(env);
  }
  return NormalizationConfig::defaults();
}

void add_io_flags(CLI::App* cmd, IoOptions& io) {
  cmd->add_option("--input,-i", io.input, "input file (default: stdin)");
  cmd->add_option("--output,-o", io.output, "output file (default: stdout)");
}

// Applies fn to every non-blank input line; blank lines pass through.
int for_each_expression(const IoOptions& io,
                        const std::function<std::string(const std::string&)>& fn) {
  std::ostringstream out;
  int status = 0;
  for (const std::string& line : read_lines(io)) {
    if (line.find_first_not_of(" \t") == std::string::npos) {
      out << "\n";
      continue;
    }
    try {
      out << fn(line) << "\n";
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      status = 1;
    }
  }
  write_text(io, out.str());
  return status;
}

std::set<dataset::Task> parse_task_list(const std::string& csv) {
  std::set<dataset::Task> tasks;
  std::istringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    auto task = dataset::task_from_name(name);
    if (!task) throw ConfigError("unknown task '" + name + "'");
    tasks.insert(*task);
  }
  if (tasks.empty()) throw ConfigError("empty task list");
  return tasks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LaTeX math corpus toolkit: tokenization, layout trees, error "
               "markup, dataset emission and recognition metrics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string norm_config_path;
  app.add_option("--config", norm_config_path,
                 "normalization config file (or $HMERTK_CONFIG)");

  // --- single-expression subcommands -------------------------------------
  IoOptions tokenize_io, normalize_io, validate_io, tree_io, parse_io, count_io;

  CLI::App* cmd_tokenize =
      app.add_subcommand("tokenize", "split raw LaTeX into space-joined tokens");
  add_io_flags(cmd_tokenize, tokenize_io);

  CLI::App* cmd_normalize =
      app.add_subcommand("normalize", "tokenize, clean and canonicalize");
  add_io_flags(cmd_normalize, normalize_io);

  CLI::App* cmd_validate =
      app.add_subcommand("validate", "report structural issues (exit 1 if any)");
  add_io_flags(cmd_validate, validate_io);
  std::string validate_format = "text";
  cmd_validate->add_option("--format", validate_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* cmd_tree = app.add_subcommand(
      "tree", "serialize the symbol layout tree (blank line between inputs)");
  add_io_flags(cmd_tree, tree_io);

  CLI::App* cmd_parse = app.add_subcommand(
      "parse", "parse serialized trees back to their LaTeX line");
  add_io_flags(cmd_parse, parse_io);

  CLI::App* cmd_count =
      app.add_subcommand("count", "per-symbol occurrence counts");
  add_io_flags(cmd_count, count_io);

  // --- diff ----------------------------------------------------------------
  CLI::App* cmd_diff = app.add_subcommand(
      "diff", "error markup and correction log between prediction and truth");
  std::string diff_pred, diff_gt, diff_output;
  cmd_diff->add_option("--pred", diff_pred, "prediction file, one expression per line")
      ->required();
  cmd_diff->add_option("--gt", diff_gt, "ground-truth file, one expression per line")
      ->required();
  cmd_diff->add_option("--output,-o", diff_output, "output file (default: stdout)");

  // --- inject ----------------------------------------------------------------
  CLI::App* cmd_inject =
      app.add_subcommand("inject", "seeded synthetic corruption of expressions");
  IoOptions inject_io;
  add_io_flags(cmd_inject, inject_io);
  std::uint64_t inject_seed = 0;
  std::string inject_config_path;
  bool inject_sidecar = false;
  cmd_inject->add_option("--seed", inject_seed, "base RNG seed")->required();
  cmd_inject->add_option("--injector-config", inject_config_path,
                         "injection config file");
  cmd_inject->add_flag("--sidecar", inject_sidecar,
                       "emit prediction-sidecar JSONL instead of mirroring the "
                       "input shape (requires TSV input)");

  // --- build-dataset ---------------------------------------------------------
  CLI::App* cmd_build =
      app.add_subcommand("build-dataset", "emit multi-task training samples");
  dataset::BuildOptions build_opts;
  std::string build_tasks_csv;
  std::string build_injector_config;
  std::optional<std::uint64_t> build_seed;
  bool build_keep_unknown = false;
  cmd_build->add_option("--input", build_opts.input_tsv, "caption TSV")->required();
  cmd_build->add_option("--output", build_opts.output_jsonl, "sample JSONL")
      ->required();
  cmd_build->add_option("--ledger", build_opts.ledger_path,
                        "ledger JSON path (default: <output>.ledger.json)");
  cmd_build->add_option("--tasks", build_tasks_csv,
                        "comma-separated tasks (default: all five)");
  cmd_build->add_option("--predictions", build_opts.sidecar_path,
                        "prediction sidecar JSONL for the error tasks");
  cmd_build->add_option("--inject-seed", build_seed,
                        "synthesize error predictions with this seed (used "
                        "when no sidecar is given)");
  cmd_build->add_option("--injector-config", build_injector_config,
                        "injection config file");
  cmd_build->add_option("--inject-per-record", build_opts.injections_per_record,
                        "synthetic predictions per record (default 1)");
  cmd_build->add_option("--workers", build_opts.workers, "worker thread count")
      ->check(CLI::PositiveNumber);
  cmd_build->add_flag("--keep-unknown", build_keep_unknown,
                      "keep records with out-of-vocabulary control words");

  // --- score -------------------------------------------------------------------
  CLI::App* cmd_score =
      app.add_subcommand("score", "score a prediction TSV against ground truth");
  std::string score_pred, score_gt, score_format = "text", score_output;
  unsigned score_workers = 1;
  cmd_score->add_option("--pred", score_pred, "prediction TSV")->required();
  cmd_score->add_option("--gt", score_gt, "ground-truth TSV")->required();
  cmd_score->add_option("--format", score_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd_score->add_option("--output,-o", score_output, "output file (default: stdout)");
  cmd_score->add_option("--workers", score_workers, "worker thread count")
      ->check(CLI::PositiveNumber);

  // --- stats ---------------------------------------------------------------------
  CLI::App* cmd_stats = app.add_subcommand(
      "stats", "preprocessing ledger and complexity/repetition histograms");
  std::string stats_input, stats_format = "text", stats_output;
  cmd_stats->add_option("--input", stats_input, "caption TSV")->required();
  cmd_stats->add_option("--format", stats_format, "text|json")
      ->check(CLI::IsMember({"text", "json"}));
  cmd_stats->add_option("--output,-o", stats_output, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    NormalizationConfig norm = resolve_norm_config(norm_config_path);

    if (cmd_tokenize->parsed()) {
      return for_each_expression(tokenize_io, [&](const std::string& line) {
        return detokenize(tokenize(line));
      });
    }

    if (cmd_normalize->parsed()) {
      return for_each_expression(normalize_io, [&](const std::string& line) {
        return detokenize(normalize(clean(tokenize(line), norm), norm));
      });
    }

    if (cmd_validate->parsed()) {
      Vocabulary vocab = Vocabulary::builtin();
      vocab.add_all(norm.extra_vocabulary);
      std::ostringstream out;
      int status = 0;
      for (const std::string& line : read_lines(validate_io)) {
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ValidationReport report = validate_raw(line, vocab);
        if (!report.ok) status = 1;
        if (validate_format == "json") {
          nlohmann::ordered_json j;
          j["input"] = line;
          j["ok"] = report.ok;
          auto issues = nlohmann::ordered_json::array();
          for (const Issue& issue : report.issues) {
            issues.push_back({{"code", std::string(issue_code_name(issue.code))},
                              {"position", issue.position},
                              {"detail", issue.detail}});
          }
          j["issues"] = issues;
          out << j.dump() << "\n";
        } else if (report.ok) {
          out << "ok\n";
        } else {
          for (const Issue& issue : report.issues) {
            out << issue_code_name(issue.code) << "@" << issue.position << ": "
                << issue.detail << "\n";
          }
        }
      }
      write_text(validate_io, out.str());
      return status;
    }

    if (cmd_tree->parsed()) {
      return for_each_expression(tree_io, [&](const std::string& line) {
        TokenSequence seq = normalize(clean(tokenize(line), norm), norm);
        return slt::serialize(slt::build(seq)) + "\n";
      });
    }

    if (cmd_parse->parsed()) {
      std::vector<std::string> lines = read_lines(parse_io);
      std::ostringstream out;
      int status = 0;
      std::vector<std::string> block;
      auto flush = [&]() {
        if (block.empty()) return;
        std::string text;
        for (const std::string& l : block) text += l + "\n";
        block.clear();
        try {
          slt::Tree tree = slt::parse(text);
          out << detokenize(tree.source) << "\n";
        } catch (const Error& e) {
          std::cerr << "error: " << e.what() << "\n";
          status = 1;
        }
      };
      for (const std::string& line : lines) {
        if (line.empty()) {
          flush();
        } else {
          block.push_back(line);
        }
      }
      flush();
      write_text(parse_io, out.str());
      return status;
    }

    if (cmd_count->parsed()) {
      return for_each_expression(count_io, [&](const std::string& line) {
        TokenSequence seq = normalize(clean(tokenize(line), norm), norm);
        return slt::count_symbols(seq).to_string();
      });
    }

    if (cmd_diff->parsed()) {
      std::vector<std::string> preds = read_lines({diff_pred, ""});
      std::vector<std::string> gts = read_lines({diff_gt, ""});
      while (!preds.empty() && preds.back().empty()) preds.pop_back();
      while (!gts.empty() && gts.back().empty()) gts.pop_back();
      if (preds.size() != gts.size()) {
        std::cerr << "error: --pred has " << preds.size() << " lines, --gt has "
                  << gts.size() << "\n";
        return 2;
      }
      std::ostringstream out;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        if (i) out << "\n";
        TokenSequence pred = normalize(clean(tokenize(preds[i]), norm), norm);
        TokenSequence gt = normalize(clean(tokenize(gts[i]), norm), norm);
        editops::EditScript script = editops::align(pred, gt);
        out << editops::mark_errors(pred, script).text << "\n";
        if (pred != gt) {
          for (const auto& round : editops::correction_rounds(pred, gt)) {
            out << round.log_line << "\n";
          }
        }
      }
      write_text({"", diff_output}, out.str());
      return 0;
    }

    if (cmd_inject->parsed()) {
      editops::InjectionConfig base = inject_config_path.empty()
                                          ? editops::InjectionConfig::defaults()
                                          : load_injection_config(inject_config_path);
      std::ostringstream out;
      std::size_t index = 0;
      int status = 0;
      for (const std::string& line : read_lines(inject_io)) {
        if (line.empty()) continue;
        std::string key, label = line;
        std::size_t tab = line.find('\t');
        if (tab != std::string::npos) {
          key = line.substr(0, tab);
          label = line.substr(tab + 1);
        }
        if (inject_sidecar && key.empty()) {
          std::cerr << "error: --sidecar needs TSV input with image refs\n";
          return 2;
        }
        editops::InjectionConfig cfg = base;
        cfg.seed = inject_seed + index++;
        try {
          TokenSequence gt = normalize(clean(tokenize(label), norm), norm);
          TokenSequence corrupted = editops::inject_errors(gt, cfg).corrupted;
          if (inject_sidecar) {
            nlohmann::ordered_json j;
            j["image"] = key;
            j["ground_truth"] = detokenize(gt);
            j["predictions"] = {detokenize(corrupted)};
            out << j.dump() << "\n";
          } else if (key.empty()) {
            out << detokenize(corrupted) << "\n";
          } else {
            out << key << "\t" << detokenize(corrupted) << "\n";
          }
        } catch (const Error& e) {
          std::cerr << "error: " << e.what() << "\n";
          status = 1;
        }
      }
      write_text(inject_io, out.str());
      return status;
    }

    if (cmd_build->parsed()) {
      build_opts.pre.norm = norm;
      build_opts.pre.keep_unknown_words = build_keep_unknown;
      if (!build_tasks_csv.empty()) {
        build_opts.tasks = parse_task_list(build_tasks_csv);
      }
      if (!build_opts.sidecar_path && build_seed) {
        editops::InjectionConfig cfg =
            build_injector_config.empty()
                ? editops::InjectionConfig::defaults()
                : load_injection_config(build_injector_config);
        cfg.seed = *build_seed;
        build_opts.injection = cfg;
      }
      dataset::BuildReport report = dataset::build_dataset(build_opts);
      std::cerr << "kept " << report.ledger.kept << " / " << report.ledger.total()
                << " records, wrote " << report.samples_written << " samples\n";
      return 0;
    }

    if (cmd_score->parsed()) {
      metrics::ScoreOptions opts;
      opts.norm = norm;
      opts.workers = score_workers;
      metrics::MetricReport report = metrics::score_corpus(score_pred, score_gt, opts);
      write_text({"", score_output}, score_format == "json"
                                         ? report.to_json() + "\n"
                                         : report.to_text());
      return 0;
    }

    if (cmd_stats->parsed()) {
      dataset::PreprocessOptions pre;
      pre.norm = norm;
      dataset::FilterLedger ledger;
      std::map<std::string, std::size_t> complexity_hist;
      std::map<std::string, std::size_t> repetition_hist;
      for (const dataset::RawRecord& rec : dataset::ingest_tsv(stats_input)) {
        auto outcome = dataset::preprocess(rec, pre);
        if (std::holds_alternative<dataset::DropReason>(outcome)) {
          ledger.add(std::get<dataset::DropReason>(outcome));
          continue;
        }
        ledger.kept += 1;
        const TokenSequence& seq = std::get<TokenSequence>(outcome);
        std::size_t c = slt::complexity(slt::build(seq));
        std::size_t r = slt::max_repetition(seq);
        ++complexity_hist[c >= 3 ? "N3" : "N" + std::to_string(c)];
        ++repetition_hist[r >= 5 ? "R5+" : "R" + std::to_string(r)];
      }
      std::ostringstream out;
      if (stats_format == "json") {
        nlohmann::ordered_json j = nlohmann::ordered_json::parse(ledger.to_json());
        j["complexity"] = complexity_hist;
        j["repetition"] = repetition_hist;
        out << j.dump(2) << "\n";
      } else {
        out << ledger.to_json() << "\n";
        out << "complexity:\n";
        for (const auto& [k, v] : complexity_hist) {
          out << "  " << k << "  " << v << "\n";
        }
        out << "repetition:\n";
        for (const auto& [k, v] : repetition_hist) {
          out << "  " << k << "  " << v << "\n";
        }
      }
      write_text({"", stats_output}, out.str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
