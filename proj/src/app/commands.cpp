#include "ransd/app/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ransd/app/cli.hpp"
#include "ransd/common/csv.hpp"
#include "ransd/common/digest.hpp"
#include "ransd/common/io.hpp"
#include "ransd/detect/split.hpp"
#include "ransd/detect/standardize.hpp"
#include "ransd/dynamic/batch.hpp"
#include "ransd/features/mutual_information.hpp"
#include "ransd/features/ngram.hpp"
#include "ransd/features/pca.hpp"
#include "ransd/features/wrapper.hpp"
#include "ransd/pe/batch.hpp"

namespace ransd::app {
namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kStaticFeatures = "static_features.csv";
constexpr const char* kDynamicFeatures = "dynamic_features.csv";
constexpr const char* kVocabulary = "vocabulary.tsv";
constexpr const char* kSplit = "split.csv";
constexpr const char* kDatasetInfo = "dataset.json";
constexpr const char* kLedger = "extraction_ledger.csv";
constexpr const char* kSelection = "selection.json";
constexpr const char* kModel = "model.json";

// Files produced downstream of extraction; a fresh extraction removes them so that later
// stages never mix outputs from two corpora.
const std::vector<std::string> kDerivedArtifacts = {
    "scree.csv", "pca.json", "mi.csv", "selection.csv", kSelection, "ngram_summary.txt",
    kModel, "cv_summary.json", "evaluation.json", "roc.csv"};

enum class Partition { Train, Test, Unlabeled };

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::Train: return "train";
    case Partition::Test: return "test";
    case Partition::Unlabeled: return "unlabeled";
  }
  return "?";
}

Partition parse_partition(std::string_view text) {
  if (text == "train") return Partition::Train;
  if (text == "test") return Partition::Test;
  if (text == "unlabeled") return Partition::Unlabeled;
  throw Error(ErrorKind::Format, "split.csv: unknown partition '" + std::string(text) + "'");
}

std::string fmt(double v) { return csv::format_number(v); }

void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw Error(ErrorKind::InvalidArgument, "--out is required");
}

std::uint64_t require_seed(const RunConfig& cfg, std::string_view command) {
  if (!cfg.seed)
    throw Error(ErrorKind::InvalidArgument, "--seed is required for " + std::string(command));
  return *cfg.seed;
}

fs::path input_file(const RunConfig& cfg, const char* name, std::string_view producer) {
  const fs::path p = cfg.out / name;
  if (!fs::is_regular_file(p))
    throw Error(ErrorKind::Io, p.string() + " not found; run " + std::string(producer) + " first");
  return p;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  io::write_text(path, text);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream o;
  fn(o);
  return o.str();
}

std::vector<ManifestEntry> load_manifest(const RunConfig& cfg) {
  if (cfg.manifest.empty()) throw Error(ErrorKind::InvalidArgument, "--manifest is required");
  if (!fs::is_regular_file(cfg.manifest))
    throw Error(ErrorKind::Io, "manifest " + cfg.manifest.string() + " not found");
  auto manifest = read_manifest(cfg.manifest);
  if (manifest.empty()) throw Error(ErrorKind::EmptyCorpus, "manifest lists no samples");
  std::set<std::string> seen;
  for (const auto& e : manifest)
    if (!seen.insert(e.path).second)
      throw Error(ErrorKind::Format, "manifest lists " + e.path + " more than once");
  return manifest;
}

// Partition per manifest entry: stratified over labelled entries when both classes occur,
// otherwise every labelled entry trains.
std::vector<Partition> assign_partitions(const std::vector<ManifestEntry>& manifest,
                                         const RunConfig& cfg, CommandLog& log) {
  const std::uint64_t seed = require_seed(cfg, "extraction");
  std::vector<std::size_t> labelled;
  std::vector<Label> labels;
  for (std::size_t i = 0; i < manifest.size(); ++i)
    if (manifest[i].label) {
      labelled.push_back(i);
      labels.push_back(*manifest[i].label);
    }
  std::vector<Partition> parts(manifest.size(), Partition::Unlabeled);
  const bool both = std::count(labels.begin(), labels.end(), Label::Malicious) > 0 &&
                    std::count(labels.begin(), labels.end(), Label::Benign) > 0;
  if (!both) {
    for (std::size_t i : labelled) parts[i] = Partition::Train;
    if (!labelled.empty()) log.note("only one class is labelled; no test partition");
    return parts;
  }
  const auto split = detect::stratified_split(labels, cfg.split, seed);
  for (std::size_t i : split.train) parts[labelled[i]] = Partition::Train;
  for (std::size_t i : split.test) parts[labelled[i]] = Partition::Test;
  return parts;
}

std::string split_csv(const std::vector<ManifestEntry>& manifest,
                      const std::vector<Partition>& parts) {
  return render([&](std::ostream& o) {
    o << "path,partition\n";
    for (std::size_t i = 0; i < manifest.size(); ++i)
      csv::write_row(o, {manifest[i].path, std::string(to_string(parts[i]))});
  });
}

std::string ledger_csv(const std::vector<LedgerEntry>& ledger) {
  return render([&](std::ostream& o) {
    o << "path,error\n";
    for (const auto& e : ledger) csv::write_row(o, {e.path, e.error});
  });
}

void prepare_extraction_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.out);
  for (const auto& name : kDerivedArtifacts) fs::remove(cfg.out / name);
  for (const auto& entry : fs::directory_iterator(cfg.out)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("ngram_") || name.starts_with("cooccurrence_")) fs::remove(entry.path());
  }
}

Json dataset_info(Mode mode, std::size_t rows, std::size_t dimension,
                  const std::vector<Partition>& parts, std::size_t failures, const RunConfig& cfg) {
  Json j;
  j["format_version"] = 1;
  j["mode"] = std::string(to_string(mode));
  j["rows"] = rows;
  j["dimension"] = dimension;
  j["manifest_entries"] = parts.size();
  j["train_entries"] = std::count(parts.begin(), parts.end(), Partition::Train);
  j["test_entries"] = std::count(parts.begin(), parts.end(), Partition::Test);
  j["failed_entries"] = failures;
  j["seed"] = *cfg.seed;
  j["split"] = cfg.split;
  return j;
}

// ---------------------------------------------------------------------------------------
// Loaded dataset shared by every post-extraction stage.

struct Data {
  Mode mode = Mode::Static;
  std::vector<std::string> paths;
  std::vector<std::optional<Label>> labels;
  std::vector<std::string> feature_names;
  Matrix dense;                            // static mode
  std::vector<dynamic::SparseRow> sparse;  // dynamic mode
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  std::size_t dimension() const { return feature_names.size(); }

  std::vector<Label> labels_of(std::span<const std::size_t> rows) const {
    std::vector<Label> out;
    for (std::size_t r : rows) out.push_back(*labels[r]);
    return out;
  }

  Matrix matrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
    if (mode == Mode::Static) return dense.select_rows(rows).select_cols(cols);
    std::vector<dynamic::SparseRow> picked;
    for (std::size_t r : rows) picked.push_back(sparse[r]);
    return dynamic::to_dense(picked, cols);
  }
};

Mode stored_mode(const RunConfig& cfg) {
  const auto info = Json::parse(io::read_text(input_file(cfg, kDatasetInfo, "extraction")));
  return parse_mode(info.at("mode").get<std::string>());
}

Data load_data(const RunConfig& cfg) {
  require_out(cfg);
  Data data;
  try {
    data.mode = stored_mode(cfg);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string(kDatasetInfo) + ": " + e.what());
  }
  if (data.mode == Mode::Static) {
    const auto rows = pe::read_static_csv(input_file(cfg, kStaticFeatures, "extract-static").string());
    const auto& names = pe::static_feature_names();
    data.feature_names.assign(names.begin(), names.end());
    data.dense = Matrix(rows.size(), pe::kStaticFeatureCount);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      data.paths.push_back(rows[r].path);
      data.labels.push_back(rows[r].features.label);
      std::copy(rows[r].features.values.begin(), rows[r].features.values.end(),
                data.dense.row(r).begin());
    }
  } else {
    const auto vocab = dynamic::TokenVocabulary::from_text(
        io::read_text(input_file(cfg, kVocabulary, "extract-dynamic")));
    for (std::size_t i = 0; i < vocab.size(); ++i) data.feature_names.push_back(vocab.feature_name(i));
    data.sparse = dynamic::read_sparse_dataset(
        input_file(cfg, kDynamicFeatures, "extract-dynamic").string(), vocab.size());
    for (const auto& row : data.sparse) {
      data.paths.push_back(row.path);
      data.labels.push_back(row.features.label);
    }
  }

  const auto split = csv::read_file(input_file(cfg, kSplit, "extraction").string());
  if (split.header != std::vector<std::string>{"path", "partition"})
    throw Error(ErrorKind::Format, "split.csv: expected header 'path,partition'");
  std::map<std::string, Partition> parts;
  for (const auto& row : split.rows) {
    if (row.size() != 2) throw Error(ErrorKind::Format, "split.csv: malformed row");
    parts[row[0]] = parse_partition(row[1]);
  }
  for (std::size_t r = 0; r < data.paths.size(); ++r) {
    const auto it = parts.find(data.paths[r]);
    if (it == parts.end())
      throw Error(ErrorKind::Format, "split.csv has no entry for " + data.paths[r]);
    if (!data.labels[r]) continue;
    if (it->second == Partition::Train) data.train.push_back(r);
    if (it->second == Partition::Test) data.test.push_back(r);
  }
  if (data.train.empty()) throw Error(ErrorKind::EmptyCorpus, "no labelled training rows");
  return data;
}

features::MiScoreTable training_mi(const Data& data) {
  if (data.mode == Mode::Dynamic) {
    std::vector<dynamic::SparseFeatureVector> rows;
    for (std::size_t r : data.train) rows.push_back(data.sparse[r].features);
    return features::rank_by_mi(rows);
  }
  std::vector<std::size_t> all(data.dimension());
  std::iota(all.begin(), all.end(), 0);
  const Matrix x = data.matrix(data.train, all);
  return features::rank_by_mi(features::binarize_at(x, features::column_medians(x)),
                               data.labels_of(data.train));
}

std::vector<std::string> names_of(const Data& data, std::span<const std::size_t> cols) {
  std::vector<std::string> out;
  for (std::size_t c : cols) out.push_back(data.feature_names[c]);
  return out;
}

bool standardizes(Mode mode, detect::ModelKind kind) {
  return mode == Mode::Static && kind != detect::ModelKind::RandomForest;
}

std::vector<std::size_t> selected_columns(const RunConfig& cfg, const Data& data) {
  const fs::path p = cfg.out / kSelection;
  if (!fs::is_regular_file(p)) {
    if (data.mode == Mode::Dynamic)
      throw Error(ErrorKind::Io, p.string() + " not found; run select first");
    std::vector<std::size_t> all(data.dimension());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  try {
    const Json doc = Json::parse(io::read_text(p));
    std::vector<std::size_t> cols;
    for (const auto& f : doc.at("selected"))
      cols.push_back(f.at("index").get<std::size_t>());
    for (std::size_t c : cols)
      if (c >= data.dimension()) throw Error(ErrorKind::Format, "selection index out of range");
    if (cols.empty()) throw Error(ErrorKind::Format, "selection.json selects no features");
    return cols;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string(kSelection) + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------------------

void cmd_extract_static(const RunConfig& cfg, CommandLog& log) {
  require_out(cfg);
  require_seed(cfg, "extraction");
  const auto manifest = load_manifest(cfg);
  const auto parts = assign_partitions(manifest, cfg, log);
  const auto dataset = pe::batch_extract_static(manifest);
  if (dataset.rows.empty())
    throw Error(ErrorKind::EmptyCorpus, "no sample could be parsed (" +
                                            std::to_string(dataset.ledger.size()) + " failures)");

  const auto features = render([&](std::ostream& o) { pe::write_static_csv(o, dataset.rows); });
  prepare_extraction_dir(cfg);
  write_file(cfg.out / kStaticFeatures, features);
  write_file(cfg.out / kSplit, split_csv(manifest, parts));
  write_file(cfg.out / kLedger, ledger_csv(dataset.ledger));
  write_file(cfg.out / kDatasetInfo,
             dump(dataset_info(Mode::Static, dataset.rows.size(), pe::kStaticFeatureCount, parts,
                               dataset.ledger.size(), cfg)));
  log.note("extracted " + std::to_string(dataset.rows.size()) + " samples x " +
           std::to_string(pe::kStaticFeatureCount) + " static features, " +
           std::to_string(dataset.ledger.size()) + " failures");
}

void cmd_extract_dynamic(const RunConfig& cfg, CommandLog& log) {
  require_out(cfg);
  require_seed(cfg, "extraction");
  const auto manifest = load_manifest(cfg);
  const auto parts = assign_partitions(manifest, cfg, log);
  std::vector<bool> in_training(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) in_training[i] = parts[i] == Partition::Train;
  if (std::none_of(in_training.begin(), in_training.end(), [](bool b) { return b; }))
    in_training.clear();
  const auto dataset = dynamic::batch_extract_dynamic(manifest, cfg.min_df, in_training);

  const auto features = render([&](std::ostream& o) { dynamic::write_sparse_dataset(o, dataset.rows); });
  prepare_extraction_dir(cfg);
  write_file(cfg.out / kVocabulary, dataset.vocabulary.to_text());
  write_file(cfg.out / kDynamicFeatures, features);
  write_file(cfg.out / kSplit, split_csv(manifest, parts));
  write_file(cfg.out / kLedger, ledger_csv(dataset.ledger));
  write_file(cfg.out / kDatasetInfo,
             dump(dataset_info(Mode::Dynamic, dataset.rows.size(), dataset.vocabulary.size(), parts,
                               dataset.ledger.size(), cfg)));
  std::string counts;
  const auto per_category = dataset.vocabulary.category_counts();
  for (std::size_t c = 0; c < dynamic::kCategoryCount; ++c)
    counts += (c ? ", " : "") + std::string(to_string(static_cast<dynamic::Category>(c))) + " " +
              std::to_string(per_category[c]);
  log.note("extracted " + std::to_string(dataset.rows.size()) + " reports, vocabulary " +
           std::to_string(dataset.vocabulary.size()) + " tokens (" + counts + "), " +
           std::to_string(dataset.ledger.size()) + " failures");
}

void cmd_pca(const RunConfig& cfg, CommandLog& log) {
  const Data data = load_data(cfg);
  std::vector<std::size_t> cols;
  Matrix x;
  if (data.mode == Mode::Dynamic) {
    cols = training_mi(data).top(cfg.mi_prefilter);
    x = data.matrix(data.train, cols);
  } else {
    cols.resize(data.dimension());
    std::iota(cols.begin(), cols.end(), 0);
    x = data.matrix(data.train, cols);
    x = detect::Standardizer::fit(x).apply(x);
  }
  const auto model = features::fit_pca(x);
  const std::size_t k = features::components_for_variance(model, cfg.variance_threshold);

  Json j;
  j["mode"] = std::string(to_string(data.mode));
  j["training_rows"] = x.rows();
  j["input_dimension"] = x.cols();
  j["standardized"] = data.mode == Mode::Static;
  j["variance_threshold"] = cfg.variance_threshold;
  j["components_for_threshold"] = k;
  j["input_features"] = names_of(data, cols);
  const auto scree_text = render([&](std::ostream& o) { features::write_scree_csv(o, features::scree(model)); });
  write_file(cfg.out / "scree.csv", scree_text);
  write_file(cfg.out / "pca.json", dump(j));
  log.note("PCA on " + std::to_string(x.cols()) + " features: " + std::to_string(k) +
           " components reach " + fmt(cfg.variance_threshold) + " of the variance");
}

void cmd_mi_rank(const RunConfig& cfg, CommandLog& log) {
  const Data data = load_data(cfg);
  const auto table = training_mi(data);
  write_file(cfg.out / "mi.csv",
             render([&](std::ostream& o) { features::write_mi_csv(o, table, data.feature_names); }));
  const std::size_t best = table.order.front();
  log.note("MI ranked " + std::to_string(table.scores.size()) + " features; top " +
           data.feature_names[best] + " (" + fmt(table.scores[best]) + " bits)");
}

void cmd_select(const RunConfig& cfg, CommandLog& log) {
  const std::uint64_t seed = require_seed(cfg, "select");
  const Data data = load_data(cfg);
  const auto candidates = training_mi(data).top(cfg.candidates);
  Matrix x = data.matrix(data.train, candidates);
  if (data.mode == Mode::Static) x = detect::Standardizer::fit(x).apply(x);
  const auto evaluator = features::make_svm_evaluator(x, data.labels_of(data.train), seed);
  std::vector<std::size_t> positions(candidates.size());
  std::iota(positions.begin(), positions.end(), 0);
  const std::size_t k_max = std::min(cfg.k_max, candidates.size());
  if (k_max < cfg.k_max)
    log.note("k_max lowered to the candidate count " + std::to_string(k_max));
  const auto trace = features::greedy_wrapper_select(positions, evaluator, k_max);

  const auto names = names_of(data, candidates);
  Json j;
  j["mode"] = std::string(to_string(data.mode));
  j["candidates"] = candidates.size();
  j["k_max"] = k_max;
  j["best_k"] = trace.best_k;
  j["best_accuracy"] = trace.best_k ? trace.steps[trace.best_k - 1].accuracy : 0.0;
  auto selected = Json::array();
  for (std::size_t p : trace.selected)
    selected.push_back({{"index", candidates[p]}, {"name", names[p]}});
  j["selected"] = std::move(selected);
  write_file(cfg.out / "selection.csv",
             render([&](std::ostream& o) { features::write_selection_csv(o, trace, names); }));
  write_file(cfg.out / kSelection, dump(j));
  log.note("wrapper selected " + std::to_string(trace.best_k) + " of " +
           std::to_string(candidates.size()) + " candidates, validation accuracy " +
           fmt(j["best_accuracy"].get<double>()));
}

void cmd_ngram(const RunConfig& cfg, CommandLog& log) {
  require_out(cfg);
  if (stored_mode(cfg) != Mode::Dynamic)
    throw Error(ErrorKind::InvalidArgument, "ngram needs a dynamic extraction");
  const auto manifest = load_manifest(cfg);
  std::vector<LedgerEntry> ledger;
  const auto reports = dynamic::load_reports(manifest, ledger);

  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
  for (dynamic::OpKind kind : cfg.ngram_kinds) {
    const auto analysis = features::class_ngram_report(reports, kind, cfg.ngram_n);
    const std::string kind_name(dynamic::to_string(kind));
    files.emplace_back("ngram_" + kind_name + ".json", features::ngram_report_json(analysis));
    summary += features::ngram_summary_text(analysis);

    // Most widespread keys first, so the matrix stays readable on large corpora.
    std::map<std::string, std::size_t> df;
    for (const auto& r : reports)
      for (const auto& key : std::set<std::string>(r.registry(kind).begin(), r.registry(kind).end()))
        ++df[key];
    std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > cfg.cooccurrence_top) ranked.resize(cfg.cooccurrence_top);
    std::vector<std::string> tokens;
    for (const auto& [key, count] : ranked) tokens.push_back(key);
    std::sort(tokens.begin(), tokens.end());
    const auto matrix = features::cooccurrence_probability(reports, kind, tokens);
    files.emplace_back("cooccurrence_" + kind_name + ".csv", render([&](std::ostream& o) {
      o << "token_a,token_b,probability\n";
      for (std::size_t a = 0; a < tokens.size(); ++a)
        for (std::size_t b = 0; b < tokens.size(); ++b)
          if (const auto p = matrix.at(a, b)) csv::write_row(o, {tokens[a], tokens[b], fmt(*p)});
    }));
    log.note("registry " + kind_name + " n-grams: " +
             (analysis.intersections_empty() ? "no sequence shared between classes"
                                             : "some sequences shared between classes"));
  }
  for (const auto& [name, text] : files) write_file(cfg.out / name, text);
  write_file(cfg.out / "ngram_summary.txt", summary);
}

void cmd_train(const RunConfig& cfg, CommandLog& log) {
  const std::uint64_t seed = require_seed(cfg, "train");
  const Data data = load_data(cfg);
  const auto cols = selected_columns(cfg, data);
  Matrix x = data.matrix(data.train, cols);
  const auto y = data.labels_of(data.train);
  std::optional<detect::Standardizer> scaler;
  if (standardizes(data.mode, cfg.model)) {
    scaler = detect::Standardizer::fit(x);
    x = scaler->apply(x);
  }
  const auto grid = detect::make_grid(cfg.model, cfg.c_grid, cfg.gamma_grid, cfg.trees_grid);
  const auto trainer = detect::default_trainer(seed);
  const auto cv = detect::k_fold_cv(x, y, cfg.folds, grid, trainer, seed);
  const auto model = trainer(x, y, cv.best());

  Json j;
  j["format_version"] = 1;
  j["mode"] = std::string(to_string(data.mode));
  j["params"] = detect::to_json(cv.best());
  auto features = Json::array();
  for (std::size_t c : cols) features.push_back({{"index", c}, {"name", data.feature_names[c]}});
  j["features"] = std::move(features);
  if (scaler) j["standardizer"] = detect::to_json(*scaler);
  j["classifier"] = detect::to_json(model);
  Json summary = detect::to_json(cv);
  summary["training_rows"] = x.rows();
  summary["features"] = cols.size();
  write_file(cfg.out / kModel, dump(j));
  write_file(cfg.out / "cv_summary.json", dump(summary));
  log.note(std::string(detect::to_string(cfg.model)) + " on " + std::to_string(cols.size()) +
           " features: best " + detect::to_json(cv.best()).dump() + ", mean CV accuracy " +
           fmt(cv.mean_accuracy[cv.best_index]));
}

void cmd_evaluate(const RunConfig& cfg, CommandLog& log) {
  const Data data = load_data(cfg);
  if (data.test.empty()) throw Error(ErrorKind::EmptyCorpus, "no labelled test rows");
  Json model_json;
  std::vector<std::size_t> cols;
  std::optional<detect::Standardizer> scaler;
  detect::Classifier classifier;
  try {
    model_json = Json::parse(io::read_text(input_file(cfg, kModel, "train")));
    if (parse_mode(model_json.at("mode").get<std::string>()) != data.mode)
      throw Error(ErrorKind::Format, "model was trained in a different mode");
    for (const auto& f : model_json.at("features")) cols.push_back(f.at("index").get<std::size_t>());
    for (std::size_t c : cols)
      if (c >= data.dimension()) throw Error(ErrorKind::Format, "model feature index out of range");
    if (model_json.contains("standardizer"))
      scaler = detect::standardizer_from_json(model_json.at("standardizer"));
    classifier = detect::classifier_from_json(model_json.at("classifier"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string(kModel) + ": " + e.what());
  }

  Matrix x = data.matrix(data.test, cols);
  if (scaler) x = scaler->apply(x);
  const auto actual = data.labels_of(data.test);
  std::vector<double> scores;
  std::vector<Label> predicted;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    scores.push_back(classifier.score(x.row(r)));
    predicted.push_back(classifier.predict(x.row(r)));
  }
  auto report = detect::evaluate(predicted, actual);
  const bool both = std::count(actual.begin(), actual.end(), Label::Malicious) > 0 &&
                    std::count(actual.begin(), actual.end(), Label::Benign) > 0;
  if (both) report.roc = detect::roc_auc(scores, actual);

  Json j;
  j["mode"] = std::string(to_string(data.mode));
  j["params"] = model_json.at("params");
  j["test_rows"] = x.rows();
  j["report"] = detect::to_json(report);
  write_file(cfg.out / "evaluation.json", dump(j));
  if (report.roc)
    write_file(cfg.out / "roc.csv", render([&](std::ostream& o) { detect::write_roc_csv(o, *report.roc); }));
  else
    fs::remove(cfg.out / "roc.csv");
  log.note("test accuracy " + fmt(report.accuracy()) + ", precision " + fmt(report.precision()) +
           ", recall " + fmt(report.recall()) + ", F1 " + fmt(report.f1()) +
           (report.roc ? ", AUC " + fmt(report.roc->auc) : std::string(", AUC undefined")));
}

void cmd_pipeline(const RunConfig& cfg, CommandLog& log) {
  require_out(cfg);
  if (!cfg.mode) throw Error(ErrorKind::InvalidArgument, "--mode is required for pipeline");
  require_seed(cfg, "pipeline");
  if (*cfg.mode == Mode::Static) {
    cmd_extract_static(cfg, log);
  } else {
    cmd_extract_dynamic(cfg, log);
  }
  cmd_pca(cfg, log);
  cmd_mi_rank(cfg, log);
  cmd_select(cfg, log);
  if (*cfg.mode == Mode::Dynamic) cmd_ngram(cfg, log);
  cmd_train(cfg, log);
  cmd_evaluate(cfg, log);
}

void write_run_index(const RunConfig& cfg, std::string_view command, const CommandLog& log) {
  write_file(cfg.out / "config.ini", cfg.to_ini());
  std::string text = std::string("ransd ") + kVersion + "\ncommand " + std::string(command) + "\n\n" +
                     cfg.to_ini() + "\n";
  for (const auto& line : log.lines) text += line + "\n";
  write_file(cfg.out / "run.log", text);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cfg.out))
    if (entry.is_regular_file() && entry.path().filename() != "artifacts.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Json index;
  index["format_version"] = 1;
  index["version"] = kVersion;
  index["command"] = std::string(command);
  auto list = Json::array();
  for (const auto& f : files)
    list.push_back({{"file", f.filename().string()},
                    {"bytes", fs::file_size(f)},
                    {"sha256", sha256_file(f.string())}});
  index["artifacts"] = std::move(list);
  write_file(cfg.out / "artifacts.json", dump(index));
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateInput:
    case ErrorKind::NonFinite:
    case ErrorKind::EvaluatorFailure:
      return 3;
    default:
      return 2;
  }
}

}  // namespace ransd::app
