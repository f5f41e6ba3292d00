#include "ransd/detect/cv.hpp"

#include <algorithm>
#include <tuple>

#include "ransd/common/error.hpp"
#include "ransd/common/parallel.hpp"
#include "ransd/detect/split.hpp"

namespace ransd::detect {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::SvmLinear: return "svm-linear";
    case ModelKind::SvmRbf: return "svm-rbf";
    case ModelKind::RandomForest: return "random-forest";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  for (ModelKind k : {ModelKind::SvmLinear, ModelKind::SvmRbf, ModelKind::RandomForest})
    if (to_string(k) == text) return k;
  throw Error(ErrorKind::InvalidArgument, "unknown model kind '" + std::string(text) + "'");
}

std::vector<ModelParams> make_grid(ModelKind kind, const std::vector<double>& Cs,
                                   const std::vector<double>& gammas,
                                   const std::vector<std::size_t>& trees) {
  const ModelParams defaults;
  std::vector<ModelParams> grid;
  if (kind == ModelKind::RandomForest) {
    if (trees.empty()) throw Error(ErrorKind::InvalidArgument, "empty tree-count grid");
    for (std::size_t t : trees) grid.push_back({kind, defaults.C, defaults.gamma, t});
    return grid;
  }
  if (Cs.empty()) throw Error(ErrorKind::InvalidArgument, "empty C grid");
  if (kind == ModelKind::SvmLinear) {
    for (double c : Cs) grid.push_back({kind, c, defaults.gamma, defaults.n_trees});
    return grid;
  }
  if (gammas.empty()) throw Error(ErrorKind::InvalidArgument, "empty gamma grid");
  for (double c : Cs)
    for (double g : gammas) grid.push_back({kind, c, g, defaults.n_trees});
  return grid;
}

double Classifier::score(std::span<const double> x) const {
  return std::visit(
      [&](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SvmModel>)
          return svm_decision(m, x);
        else
          return rf_score(m, x);
      },
      model_);
}

Label Classifier::predict(std::span<const double> x) const {
  if (const auto* svm = std::get_if<SvmModel>(&model_)) return svm_predict(*svm, x);
  return rf_predict(std::get<RandomForestModel>(model_), x);
}

double Classifier::threshold() const {
  return std::holds_alternative<SvmModel>(model_) ? 0.0 : 0.5;
}

Trainer default_trainer(std::uint64_t seed) {
  return [seed](const Matrix& x, std::span<const Label> y, const ModelParams& p) {
    if (p.kind == ModelKind::RandomForest) {
      ForestParams fp;
      fp.n_trees = p.n_trees;
      fp.seed = seed;
      return Classifier(train_random_forest(x, y, fp));
    }
    SvmParams sp;
    sp.C = p.C;
    sp.kernel = p.kind == ModelKind::SvmRbf ? Kernel::rbf(p.gamma) : Kernel::linear();
    return Classifier(train_svm(x, y, sp));
  };
}

CvResult k_fold_cv(const Matrix& x, std::span<const Label> labels, std::size_t k,
                   const std::vector<ModelParams>& grid, const Trainer& trainer,
                   std::uint64_t seed) {
  if (labels.size() != x.rows()) throw Error(ErrorKind::LengthMismatch, "CV rows vs labels");
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty parameter grid");
  require_both_classes(labels, "cross-validation");

  CvResult result;
  result.grid = grid;
  result.folds = stratified_folds(labels, k, seed);

  std::vector<std::vector<std::size_t>> train_sets(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<bool> held(labels.size(), false);
    for (std::size_t i : result.folds[f]) held[i] = true;
    bool has[2] = {false, false};
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (!held[i]) {
        train_sets[f].push_back(i);
        has[to_bit(labels[i])] = true;
      }
    if (!has[0] || !has[1])
      throw Error(ErrorKind::FoldTooSmall,
                  "training fold " + std::to_string(f) + " lacks one of the classes");
  }

  std::vector<std::vector<EvaluationReport>> reports(grid.size(), std::vector<EvaluationReport>(k));
  parallel_for(grid.size() * k, [&](std::size_t job) {
    const std::size_t g = job / k;
    const std::size_t f = job % k;
    const Matrix xt = x.select_rows(train_sets[f]);
    std::vector<Label> yt;
    for (std::size_t i : train_sets[f]) yt.push_back(labels[i]);
    const Classifier model = trainer(xt, yt, grid[g]);
    std::vector<Label> predicted, actual;
    for (std::size_t i : result.folds[f]) {
      predicted.push_back(model.predict(x.row(i)));
      actual.push_back(labels[i]);
    }
    reports[g][f] = evaluate(predicted, actual);
  });

  result.fold_accuracy.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (const auto& r : reports[g]) {
      result.fold_accuracy[g].push_back(r.accuracy());
      sum += r.accuracy();
    }
    result.mean_accuracy.push_back(sum / static_cast<double>(k));
  }

  auto rank = [&](std::size_t g) {
    return std::make_tuple(-result.mean_accuracy[g], grid[g].C, grid[g].gamma, grid[g].n_trees);
  };
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (rank(g) < rank(result.best_index)) result.best_index = g;
  result.best_fold_reports = reports[result.best_index];
  return result;
}

nlohmann::ordered_json to_json(const ModelParams& p) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(p.kind));
  if (p.kind != ModelKind::RandomForest) j["C"] = p.C;
  if (p.kind == ModelKind::SvmRbf) j["gamma"] = p.gamma;
  if (p.kind == ModelKind::RandomForest) j["n_trees"] = p.n_trees;
  return j;
}

ModelParams params_from_json(const nlohmann::ordered_json& j) {
  try {
    ModelParams p;
    p.kind = parse_model_kind(j.at("kind").get<std::string>());
    p.C = j.value("C", p.C);
    p.gamma = j.value("gamma", p.gamma);
    p.n_trees = j.value("n_trees", p.n_trees);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("model parameters: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const Classifier& c) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  if (const auto* svm = std::get_if<SvmModel>(&c.model())) {
    j["type"] = "svm";
    j["svm"] = to_json(*svm);
  } else {
    j["type"] = "random_forest";
    j["forest"] = to_json(std::get<RandomForestModel>(c.model()));
  }
  return j;
}

Classifier classifier_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("format_version").get<int>() != 1)
      throw Error(ErrorKind::Format, "unsupported model format version");
    const auto type = j.at("type").get<std::string>();
    if (type == "svm") return Classifier(svm_from_json(j.at("svm")));
    if (type == "random_forest") return Classifier(forest_from_json(j.at("forest")));
    throw Error(ErrorKind::Format, "unknown model type " + type);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("model file: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const CvResult& r) {
  nlohmann::ordered_json j;
  j["folds"] = r.folds.size();
  auto grid = nlohmann::ordered_json::array();
  for (std::size_t g = 0; g < r.grid.size(); ++g) {
    auto entry = to_json(r.grid[g]);
    entry["fold_accuracy"] = r.fold_accuracy[g];
    entry["mean_accuracy"] = r.mean_accuracy[g];
    grid.push_back(std::move(entry));
  }
  j["grid"] = std::move(grid);
  j["best"] = to_json(r.best());
  j["best_mean_accuracy"] = r.mean_accuracy.at(r.best_index);
  auto reports = nlohmann::ordered_json::array();
  for (const auto& rep : r.best_fold_reports) reports.push_back(to_json(rep));
  j["best_fold_reports"] = std::move(reports);
  return j;
}

}  // namespace ransd::detect
