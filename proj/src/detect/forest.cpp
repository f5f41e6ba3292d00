#include "ransd/detect/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ransd/common/error.hpp"
#include "ransd/common/parallel.hpp"

namespace ransd::detect {
namespace {

constexpr double kSplitTolerance = 1e-12;

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = -1.0;
};

// Sum over children of (pos^2 + neg^2) / size; larger means lower weighted Gini impurity.
double child_score(double lp, double ln, double rp, double rn) {
  return (lp * lp + ln * ln) / (lp + ln) + (rp * rp + rn * rn) / (rp + rn);
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, std::span<const int> y, std::size_t max_features, Rng& rng)
      : x_(x), y_(y), max_features_(max_features), rng_(rng), order_(x.cols()) {
    std::iota(order_.begin(), order_.end(), 0);
  }

  int build(std::vector<std::size_t>& rows) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    std::size_t positives = 0;
    for (std::size_t r : rows) positives += static_cast<std::size_t>(y_[r]);
    tree_.nodes[id].samples = rows.size();
    tree_.nodes[id].positives = positives;
    if (positives == 0 || positives == rows.size()) return id;

    const SplitChoice best = best_split(rows, positives);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows)
      (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[id].feature = best.feature;
    tree_.nodes[id].threshold = best.threshold;
    const int l = build(left);
    tree_.nodes[id].left = l;
    const int r = build(right);
    tree_.nodes[id].right = r;
    return id;
  }

  DecisionTree take() { return std::move(tree_); }

 private:
  bool is_constant(std::span<const std::size_t> rows, std::size_t f) const {
    const double first = x_(rows[0], f);
    return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return x_(r, f) == first; });
  }

  SplitChoice best_split(std::span<const std::size_t> rows, std::size_t positives) {
    std::shuffle(order_.begin(), order_.end(), rng_);
    std::vector<std::size_t> chosen;
    for (std::size_t f : order_) {
      if (chosen.size() == max_features_) break;
      if (!is_constant(rows, f)) chosen.push_back(f);
    }
    std::sort(chosen.begin(), chosen.end());

    SplitChoice best;
    const double total_p = static_cast<double>(positives);
    const double total_n = static_cast<double>(rows.size() - positives);
    std::vector<std::pair<double, int>> values(rows.size());
    for (std::size_t f : chosen) {
      for (std::size_t i = 0; i < rows.size(); ++i) values[i] = {x_(rows[i], f), y_[rows[i]]};
      std::sort(values.begin(), values.end());
      double lp = 0, ln = 0;
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        (values[i].second ? lp : ln) += 1;
        if (values[i].first == values[i + 1].first) continue;
        const double score = child_score(lp, ln, total_p - lp, total_n - ln);
        if (best.feature < 0 || score > best.score + kSplitTolerance * std::max(1.0, best.score)) {
          best.feature = static_cast<int>(f);
          best.threshold = values[i].first + (values[i + 1].first - values[i].first) / 2;
          best.score = score;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t max_features_;
  Rng& rng_;
  std::vector<std::size_t> order_;
  DecisionTree tree_;
};

void check_dimension(const RandomForestModel& model, std::span<const double> x) {
  if (x.size() != model.dimension)
    throw Error(ErrorKind::DimensionMismatch, "forest input has " + std::to_string(x.size()) +
                                                  " features, model expects " +
                                                  std::to_string(model.dimension));
}

nlohmann::ordered_json node_json(const DecisionTree& tree, int id) {
  const TreeNode& node = tree.nodes.at(static_cast<std::size_t>(id));
  nlohmann::ordered_json j;
  j["samples"] = node.samples;
  j["positives"] = node.positives;
  if (!node.is_leaf()) {
    j["feature"] = node.feature;
    j["threshold"] = node.threshold;
    j["left"] = node_json(tree, node.left);
    j["right"] = node_json(tree, node.right);
  }
  return j;
}

int node_from_json(const nlohmann::ordered_json& j, DecisionTree& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  TreeNode node;
  node.samples = j.at("samples").get<std::size_t>();
  node.positives = j.at("positives").get<std::size_t>();
  if (j.contains("feature")) {
    node.feature = j.at("feature").get<int>();
    node.threshold = j.at("threshold").get<double>();
    node.left = node_from_json(j.at("left"), tree);
    node.right = node_from_json(j.at("right"), tree);
  }
  tree.nodes[static_cast<std::size_t>(id)] = node;
  return id;
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes.at(0);
  while (!node->is_leaf())
    node = &nodes[static_cast<std::size_t>(
        x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right)];
  return *node;
}

bool DecisionTree::votes_positive(std::span<const double> x) const {
  const TreeNode& leaf = leaf_for(x);
  return 2 * leaf.positives >= leaf.samples;
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& node = nodes[static_cast<std::size_t>(id)];
    if (!node.is_leaf()) {
      stack.push_back({node.left, d + 1});
      stack.push_back({node.right, d + 1});
    }
  }
  return deepest;
}

DecisionTree grow_tree(const Matrix& x, std::span<const int> y01, std::vector<std::size_t> rows,
                       std::size_t max_features, Rng& rng) {
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "cannot grow a tree on no rows");
  if (max_features == 0 || max_features > x.cols())
    throw Error(ErrorKind::InvalidArgument, "max_features must lie in [1, d]");
  TreeBuilder builder(x, y01, max_features, rng);
  builder.build(rows);
  return builder.take();
}

RandomForestModel train_random_forest(const Matrix& x, std::span<const Label> labels,
                                      const ForestParams& params) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (labels.size() != n) throw Error(ErrorKind::LengthMismatch, "forest rows vs labels");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "random forest needs at least 2 samples");
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "random forest needs at least 1 feature");
  if (params.n_trees == 0) throw Error(ErrorKind::InvalidArgument, "n_trees must be >= 1");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "forest input contains NaN or infinity");

  RandomForestModel model;
  model.n_trees = params.n_trees;
  model.seed = params.seed;
  model.dimension = d;
  model.max_features = params.max_features.value_or(
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))))));
  if (model.max_features == 0 || model.max_features > d)
    throw Error(ErrorKind::InvalidArgument, "max_features must lie in [1, d]");

  const std::vector<int> y = to_bits(labels);
  model.trees.resize(params.n_trees);
  parallel_for(params.n_trees, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& r : rows) r = pick(rng);
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    model.trees[t] = grow_tree(x, y, std::move(rows), model.max_features, rng);
  });
  return model;
}

double rf_score(const RandomForestModel& model, std::span<const double> x) {
  check_dimension(model, x);
  if (model.trees.empty()) throw Error(ErrorKind::InvalidArgument, "forest has no trees");
  std::size_t votes = 0;
  for (const auto& tree : model.trees) votes += tree.votes_positive(x) ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(model.trees.size());
}

Label rf_predict(const RandomForestModel& model, std::span<const double> x) {
  return rf_score(model, x) >= 0.5 ? Label::Malicious : Label::Benign;
}

nlohmann::ordered_json to_json(const RandomForestModel& model) {
  nlohmann::ordered_json j;
  j["n_trees"] = model.n_trees;
  j["max_features"] = model.max_features;
  j["seed"] = model.seed;
  j["dimension"] = model.dimension;
  auto trees = nlohmann::ordered_json::array();
  for (const auto& tree : model.trees) trees.push_back(node_json(tree, 0));
  j["trees"] = std::move(trees);
  return j;
}

RandomForestModel forest_from_json(const nlohmann::ordered_json& j) {
  try {
    RandomForestModel model;
    model.n_trees = j.at("n_trees").get<std::size_t>();
    model.max_features = j.at("max_features").get<std::size_t>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.dimension = j.at("dimension").get<std::size_t>();
    for (const auto& t : j.at("trees")) {
      DecisionTree tree;
      node_from_json(t, tree);
      for (const auto& node : tree.nodes)
        if (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= model.dimension)
          throw Error(ErrorKind::Format, "tree node feature out of range");
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != model.n_trees)
      throw Error(ErrorKind::Format, "tree count does not match n_trees");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("forest model: ") + e.what());
  }
}

}  // namespace ransd::detect
