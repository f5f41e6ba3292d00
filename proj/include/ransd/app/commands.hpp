#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ransd/app/config.hpp"
#include "ransd/common/error.hpp"

namespace ransd::app {

/// Human-readable notes a command produces; echoed to stdout and run.log.
struct CommandLog {
  std::vector<std::string> lines;
  void note(std::string line) { lines.push_back(std::move(line)); }
};

// Each command reads its inputs and computes everything before it writes into cfg.out.
// Failures are thrown as ransd::Error.

/// static_features.csv, split.csv, dataset.json, extraction_ledger.csv
void cmd_extract_static(const RunConfig& cfg, CommandLog& log);
/// vocabulary.tsv, dynamic_features.csv, split.csv, dataset.json, extraction_ledger.csv
void cmd_extract_dynamic(const RunConfig& cfg, CommandLog& log);
/// scree.csv, pca.json
void cmd_pca(const RunConfig& cfg, CommandLog& log);
/// mi.csv
void cmd_mi_rank(const RunConfig& cfg, CommandLog& log);
/// selection.csv, selection.json
void cmd_select(const RunConfig& cfg, CommandLog& log);
/// ngram_<kind>.json, cooccurrence_<kind>.csv, ngram_summary.txt (dynamic mode only)
void cmd_ngram(const RunConfig& cfg, CommandLog& log);
/// model.json, cv_summary.json
void cmd_train(const RunConfig& cfg, CommandLog& log);
/// evaluation.json, roc.csv
void cmd_evaluate(const RunConfig& cfg, CommandLog& log);
/// Every stage in order for cfg.mode.
void cmd_pipeline(const RunConfig& cfg, CommandLog& log);

/// Rewrites config.ini, run.log and artifacts.json (SHA-256 of every other file in `out`).
void write_run_index(const RunConfig& cfg, std::string_view command, const CommandLog& log);

/// 2 for usage and input problems, 3 for numerical failures.
int exit_code_for(ErrorKind kind);

}  // namespace ransd::app
