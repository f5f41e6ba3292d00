#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ransd/detect/forest.hpp"
#include "ransd/detect/metrics.hpp"
#include "ransd/detect/svm.hpp"

namespace ransd::detect {

enum class ModelKind { SvmLinear, SvmRbf, RandomForest };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

struct ModelParams {
  ModelKind kind = ModelKind::SvmRbf;
  double C = 10.0;
  double gamma = 0.013;
  std::size_t n_trees = 200;

  bool operator==(const ModelParams&) const = default;
};

/// Cartesian product; parameters irrelevant to `kind` are collapsed to a single value.
std::vector<ModelParams> make_grid(ModelKind kind, const std::vector<double>& Cs,
                                   const std::vector<double>& gammas,
                                   const std::vector<std::size_t>& trees);

/// A trained SVM or forest behind one scoring interface.
class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(SvmModel m) : model_(std::move(m)) {}
  explicit Classifier(RandomForestModel m) : model_(std::move(m)) {}

  double score(std::span<const double> x) const;
  Label predict(std::span<const double> x) const;
  /// Score at which predict() switches to malicious.
  double threshold() const;

  const std::variant<SvmModel, RandomForestModel>& model() const { return model_; }

 private:
  std::variant<SvmModel, RandomForestModel> model_;
};

using Trainer =
    std::function<Classifier(const Matrix& x, std::span<const Label> y, const ModelParams& params)>;

/// SVMs via train_svm, forests via train_random_forest with the given seed.
Trainer default_trainer(std::uint64_t seed);

struct CvResult {
  std::vector<ModelParams> grid;
  std::vector<std::vector<double>> fold_accuracy;  // [grid point][fold]
  std::vector<double> mean_accuracy;
  std::size_t best_index = 0;
  std::vector<EvaluationReport> best_fold_reports;
  std::vector<std::vector<std::size_t>> folds;

  const ModelParams& best() const { return grid.at(best_index); }
};

/// Stratified k-fold search. Best = highest mean accuracy, ties to smaller C, then smaller
/// gamma, then fewer trees. Throws SingleClass, FoldTooSmall (k < 2, k > n, or a training
/// fold missing a class), InvalidArgument on an empty grid.
CvResult k_fold_cv(const Matrix& x, std::span<const Label> labels, std::size_t k,
                   const std::vector<ModelParams>& grid, const Trainer& trainer,
                   std::uint64_t seed);

nlohmann::ordered_json to_json(const ModelParams& p);
ModelParams params_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const Classifier& c);
Classifier classifier_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const CvResult& r);

}  // namespace ransd::detect
