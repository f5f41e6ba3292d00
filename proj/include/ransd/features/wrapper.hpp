#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ransd/common/labels.hpp"
#include "ransd/common/matrix.hpp"

namespace ransd::features {

/// Validation accuracy of a classifier trained on the given feature columns.
using SubsetEvaluator = std::function<double(std::span<const std::size_t> features)>;

struct SelectionStep {
  std::size_t k;
  std::size_t added;
  double accuracy;
};

struct SelectionTrace {
  std::vector<SelectionStep> steps;
  std::size_t best_k = 0;               // smallest k reaching the maximum accuracy
  std::vector<std::size_t> selected;    // first best_k added features

  std::vector<double> best_so_far() const;
};

/// Greedy forward selection: each step appends the candidate that maximises the
/// evaluator on (current set + candidate); ties go to the lower feature index.
/// Evaluator exceptions surface as EvaluatorFailure.
SelectionTrace greedy_wrapper_select(std::span<const std::size_t> candidates,
                                     const SubsetEvaluator& evaluator, std::size_t k_max);

/// Linear SVM (C = 1 by default) trained on a fixed stratified internal split of (x, labels).
SubsetEvaluator make_svm_evaluator(const Matrix& x, std::span<const Label> labels,
                                   std::uint64_t seed, double C = 1.0,
                                   double train_fraction = 0.8);

/// `k,added_feature,accuracy`
void write_selection_csv(std::ostream& out, const SelectionTrace& trace,
                         const std::vector<std::string>& feature_names);

}  // namespace ransd::features
