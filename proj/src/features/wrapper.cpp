#include "ransd/features/wrapper.hpp"

#include <algorithm>
#include <ostream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"
#include "ransd/common/parallel.hpp"
#include "ransd/detect/split.hpp"
#include "ransd/detect/svm.hpp"

namespace ransd::features {

std::vector<double> SelectionTrace::best_so_far() const {
  std::vector<double> out;
  double best = 0.0;
  for (const auto& s : steps) {
    best = out.empty() ? s.accuracy : std::max(best, s.accuracy);
    out.push_back(best);
  }
  return out;
}

SelectionTrace greedy_wrapper_select(std::span<const std::size_t> candidates,
                                     const SubsetEvaluator& evaluator, std::size_t k_max) {
  std::vector<std::size_t> remaining(candidates.begin(), candidates.end());
  std::sort(remaining.begin(), remaining.end());
  remaining.erase(std::unique(remaining.begin(), remaining.end()), remaining.end());
  k_max = std::min(k_max, remaining.size());

  SelectionTrace trace;
  std::vector<std::size_t> current;
  double best_accuracy = -1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    std::vector<double> scores(remaining.size());
    parallel_for(remaining.size(), [&](std::size_t c) {
      std::vector<std::size_t> trial = current;
      trial.push_back(remaining[c]);
      try {
        scores[c] = evaluator(trial);
      } catch (const std::exception& e) {
        throw Error(ErrorKind::EvaluatorFailure,
                    "feature " + std::to_string(remaining[c]) + ": " + e.what());
      }
    });
    // remaining is ascending, so the first maximum is the lowest index
    const auto winner = static_cast<std::size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
    current.push_back(remaining[winner]);
    trace.steps.push_back({k, remaining[winner], scores[winner]});
    if (scores[winner] > best_accuracy) {
      best_accuracy = scores[winner];
      trace.best_k = k;
    }
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(winner));
  }
  trace.selected.assign(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(trace.best_k));
  return trace;
}

SubsetEvaluator make_svm_evaluator(const Matrix& x, std::span<const Label> labels,
                                   std::uint64_t seed, double C, double train_fraction) {
  if (x.rows() != labels.size()) throw Error(ErrorKind::LengthMismatch, "evaluator rows vs labels");
  require_both_classes(labels, "wrapper selection");
  const auto split = detect::stratified_split(labels, train_fraction, seed);
  std::vector<Label> all(labels.begin(), labels.end());
  std::vector<Label> train_y, val_y;
  for (auto i : split.train) train_y.push_back(all[i]);
  for (auto i : split.test) val_y.push_back(all[i]);
  require_both_classes(train_y, "wrapper training split");
  if (val_y.empty()) throw Error(ErrorKind::DegenerateInput, "wrapper validation split is empty");

  Matrix train_x = x.select_rows(split.train);
  Matrix val_x = x.select_rows(split.test);
  detect::SvmParams params;
  params.kernel = detect::Kernel::linear();
  params.C = C;
  return [train_x = std::move(train_x), val_x = std::move(val_x), train_y = std::move(train_y),
          val_y = std::move(val_y), params](std::span<const std::size_t> features) {
    const auto model = detect::train_svm(train_x.select_cols(features), train_y, params);
    const Matrix vx = val_x.select_cols(features);
    std::size_t correct = 0;
    for (std::size_t r = 0; r < vx.rows(); ++r)
      if (detect::svm_predict(model, vx.row(r)) == val_y[r]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(vx.rows());
  };
}

void write_selection_csv(std::ostream& out, const SelectionTrace& trace,
                         const std::vector<std::string>& feature_names) {
  out << "k,added_feature,accuracy\n";
  for (const auto& s : trace.steps)
    csv::write_row(out, {std::to_string(s.k),
                         s.added < feature_names.size() ? feature_names[s.added] : std::to_string(s.added),
                         csv::format_number(s.accuracy)});
}

}  // namespace ransd::features
