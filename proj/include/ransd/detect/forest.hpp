#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "ransd/common/labels.hpp"
#include "ransd/common/matrix.hpp"
#include "ransd/common/random.hpp"

namespace ransd::detect {

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;  // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  std::size_t samples = 0;
  std::size_t positives = 0;

  bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
 public:
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  /// Positive when the reached leaf is at least half malicious.
  bool votes_positive(std::span<const double> x) const;
  const TreeNode& leaf_for(std::span<const double> x) const;
  std::size_t depth() const;
};

/// Grows one unpruned Gini tree on `rows` (duplicates allowed). At each node, features are
/// visited in a random order until `max_features` non-constant ones are found; those are
/// searched exhaustively in ascending index order and a later candidate replaces the best
/// only when strictly better.
DecisionTree grow_tree(const Matrix& x, std::span<const int> y01, std::vector<std::size_t> rows,
                       std::size_t max_features, Rng& rng);

struct ForestParams {
  std::size_t n_trees = 200;
  std::optional<std::size_t> max_features;  // default floor(sqrt(d)), at least 1
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct RandomForestModel {
  std::vector<DecisionTree> trees;
  std::size_t n_trees = 0;
  std::size_t max_features = 0;
  std::uint64_t seed = 0;
  std::size_t dimension = 0;
};

/// Tree t uses a generator seeded from (seed, t). Single-class data is accepted and yields
/// leaf-only trees. Throws InvalidArgument, NonFinite, LengthMismatch.
RandomForestModel train_random_forest(const Matrix& x, std::span<const Label> labels,
                                      const ForestParams& params);

/// Fraction of trees voting malicious. Throws DimensionMismatch.
double rf_score(const RandomForestModel& model, std::span<const double> x);
/// Majority vote; an even split goes to malicious.
Label rf_predict(const RandomForestModel& model, std::span<const double> x);

/// Trees as nested node records.
nlohmann::ordered_json to_json(const RandomForestModel& model);
RandomForestModel forest_from_json(const nlohmann::ordered_json& j);

}  // namespace ransd::detect
