#include "ransd/app/cli.hpp"

#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "ransd/app/commands.hpp"

namespace ransd::app {
namespace {

using Command = void (*)(const RunConfig&, CommandLog&);

struct CommandSpec {
  const char* name;
  const char* help;
  Command fn;
};

const CommandSpec kCommands[] = {
    {"extract-static", "Extract PE header features from a manifest", cmd_extract_static},
    {"extract-dynamic", "Extract behaviour-report tokens from a manifest", cmd_extract_dynamic},
    {"pca", "Fit PCA on the training partition and write the scree data", cmd_pca},
    {"mi-rank", "Rank features by mutual information with the label", cmd_mi_rank},
    {"select", "Greedy wrapper selection over the top MI candidates", cmd_select},
    {"ngram", "Registry sequence n-grams and co-occurrence (dynamic)", cmd_ngram},
    {"train", "Cross-validate the grid and fit the final model", cmd_train},
    {"evaluate", "Score the test partition", cmd_evaluate},
    {"pipeline", "Run every stage for --mode", cmd_pipeline},
};

// Flags write into `given`; only flags that appeared on the command line are copied over
// the defaults and config file values.
struct FlagBinding {
  CLI::Option* option;
  std::function<void(RunConfig&, const RunConfig&)> copy;
};

std::vector<FlagBinding> add_flags(CLI::App& app, RunConfig& given, std::string& mode,
                                   std::string& model, std::vector<std::string>& kinds) {
  std::vector<FlagBinding> b;
  auto bind = [&](CLI::Option* opt, auto member) {
    b.push_back({opt, [member](RunConfig& dst, const RunConfig& src) { dst.*member = src.*member; }});
  };
  b.push_back({app.add_option("--mode", mode, "static or dynamic")->check(CLI::IsMember({"static", "dynamic"})),
               [&mode](RunConfig& dst, const RunConfig&) { dst.mode = parse_mode(mode); }});
  bind(app.add_option("--manifest", given.manifest, "CSV with path,label columns"), &RunConfig::manifest);
  bind(app.add_option("--out", given.out, "Output directory"), &RunConfig::out);
  bind(app.add_option("--seed", given.seed, "Master seed"), &RunConfig::seed);
  bind(app.add_option("--split", given.split, "Training fraction"), &RunConfig::split);
  bind(app.add_option("--min-df", given.min_df, "Minimum report frequency of a token"), &RunConfig::min_df);
  bind(app.add_option("--mi-prefilter", given.mi_prefilter, "Top-MI features fed to dynamic PCA"),
       &RunConfig::mi_prefilter);
  bind(app.add_option("--candidates", given.candidates, "Top-MI features offered to the wrapper"),
       &RunConfig::candidates);
  bind(app.add_option("--k-max", given.k_max, "Wrapper steps"), &RunConfig::k_max);
  bind(app.add_option("--variance-threshold", given.variance_threshold, "Explained-variance target"),
       &RunConfig::variance_threshold);
  bind(app.add_option("--ngram-n", given.ngram_n, "N-gram sizes")->delimiter(','), &RunConfig::ngram_n);
  b.push_back({app.add_option("--ngram-kinds", kinds, "Registry operations to mine")->delimiter(','),
               [&kinds](RunConfig& dst, const RunConfig&) {
                 dst.ngram_kinds.clear();
                 for (const auto& k : kinds) dst.ngram_kinds.push_back(dynamic::parse_op_kind(k));
               }});
  bind(app.add_option("--cooccurrence-top", given.cooccurrence_top, "Keys in each co-occurrence table"),
       &RunConfig::cooccurrence_top);
  b.push_back({app.add_option("--model", model, "svm-linear, svm-rbf or random-forest"),
               [&model](RunConfig& dst, const RunConfig&) { dst.model = detect::parse_model_kind(model); }});
  bind(app.add_option("--folds", given.folds, "Cross-validation folds"), &RunConfig::folds);
  bind(app.add_option("--c-grid", given.c_grid, "Penalty values")->delimiter(','), &RunConfig::c_grid);
  bind(app.add_option("--gamma-grid", given.gamma_grid, "RBF widths")->delimiter(','), &RunConfig::gamma_grid);
  bind(app.add_option("--trees-grid", given.trees_grid, "Forest sizes")->delimiter(','),
       &RunConfig::trees_grid);
  return b;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ransomware detection from PE headers and sandbox behaviour reports", "ransd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ransd ") + kVersion);

  RunConfig given;
  std::string mode, model, config_path;
  std::vector<std::string> kinds;
  std::vector<std::pair<CLI::App*, const CommandSpec*>> subs;
  std::vector<std::vector<FlagBinding>> bindings;
  for (const auto& spec : kCommands) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("--config", config_path, "INI file with [run], [features], [model] sections");
    bindings.push_back(add_flags(*sub, given, mode, model, kinds));
    subs.emplace_back(sub, &spec);
  }

  std::vector<const char*> argv{"ransd"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (std::size_t s = 0; s < subs.size(); ++s) {
    if (!subs[s].first->parsed()) continue;
    const CommandSpec& spec = *subs[s].second;
    try {
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
      for (const auto& binding : bindings[s])
        if (binding.option->count() > 0) binding.copy(cfg, given);
      cfg.validate();
      CommandLog log;
      spec.fn(cfg, log);
      write_run_index(cfg, spec.name, log);
      for (const auto& line : log.lines) out << line << '\n';
      return 0;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
      err << "error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      err << "internal error: " << e.what() << '\n';
      return 3;
    }
  }
  return 2;
}

}  // namespace ransd::app
