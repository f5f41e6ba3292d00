#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "ransd/common/labels.hpp"

namespace ransd::detect {

struct Confusion {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

double f1_score(double precision, double recall);

/// Metrics are derived from the counts on demand. Ratios with an empty denominator are 0.
struct EvaluationReport {
  Confusion counts;
  std::optional<RocCurve> roc;

  double accuracy() const;
  double precision() const;
  double recall() const;
  double f1() const;
  double false_negative_rate() const;
};

/// Malicious is the positive class. Throws LengthMismatch or InvalidArgument on empty input.
EvaluationReport evaluate(std::span<const Label> predicted, std::span<const Label> actual);

/// Thresholded scores (score >= threshold is malicious) plus the ROC curve.
EvaluationReport evaluate_scores(std::span<const double> scores, std::span<const Label> actual,
                                 double threshold);

/// Sweeps every distinct score from high to low; equal scores move together, so ties add
/// a diagonal segment. AUC by the trapezoid rule. Throws SingleClass.
RocCurve roc_auc(std::span<const double> scores, std::span<const Label> labels);

nlohmann::ordered_json to_json(const EvaluationReport& report);
/// `fpr,tpr`
void write_roc_csv(std::ostream& out, const RocCurve& roc);

}  // namespace ransd::detect
