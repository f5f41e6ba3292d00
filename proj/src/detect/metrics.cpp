#include "ransd/detect/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"

namespace ransd::detect {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw Error(ErrorKind::LengthMismatch, "predictions and labels differ in length");
  if (a == 0) throw Error(ErrorKind::InvalidArgument, "cannot evaluate an empty set");
}

}  // namespace

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

double EvaluationReport::accuracy() const { return ratio(counts.tp + counts.tn, counts.total()); }
double EvaluationReport::precision() const { return ratio(counts.tp, counts.tp + counts.fp); }
double EvaluationReport::recall() const { return ratio(counts.tp, counts.tp + counts.fn); }
double EvaluationReport::f1() const { return f1_score(precision(), recall()); }
double EvaluationReport::false_negative_rate() const { return ratio(counts.fn, counts.tp + counts.fn); }

EvaluationReport evaluate(std::span<const Label> predicted, std::span<const Label> actual) {
  check_lengths(predicted.size(), actual.size());
  EvaluationReport report;
  auto& c = report.counts;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool p = predicted[i] == Label::Malicious;
    const bool a = actual[i] == Label::Malicious;
    if (p && a) ++c.tp;
    else if (p) ++c.fp;
    else if (a) ++c.fn;
    else ++c.tn;
  }
  return report;
}

EvaluationReport evaluate_scores(std::span<const double> scores, std::span<const Label> actual,
                                 double threshold) {
  check_lengths(scores.size(), actual.size());
  std::vector<Label> predicted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    predicted[i] = scores[i] >= threshold ? Label::Malicious : Label::Benign;
  EvaluationReport report = evaluate(predicted, actual);
  report.roc = roc_auc(scores, actual);
  return report;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  check_lengths(scores.size(), labels.size());
  require_both_classes(labels, "ROC curve");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t pos = 0;
  for (Label l : labels) pos += static_cast<std::size_t>(to_bit(l));
  const double p = static_cast<double>(pos);
  const double n = static_cast<double>(labels.size() - pos);

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i)
      (labels[order[i]] == Label::Malicious ? tp : fp) += 1;
    const RocPoint next{static_cast<double>(fp) / n, static_cast<double>(tp) / p};
    const RocPoint& prev = roc.points.back();
    roc.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    roc.points.push_back(next);
  }
  return roc;
}

nlohmann::ordered_json to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["tp"] = report.counts.tp;
  j["tn"] = report.counts.tn;
  j["fp"] = report.counts.fp;
  j["fn"] = report.counts.fn;
  j["accuracy"] = report.accuracy();
  j["precision"] = report.precision();
  j["recall"] = report.recall();
  j["f1"] = report.f1();
  j["false_negative_rate"] = report.false_negative_rate();
  if (report.roc) {
    j["auc"] = report.roc->auc;
    auto points = nlohmann::ordered_json::array();
    for (const auto& pt : report.roc->points) points.push_back({pt.fpr, pt.tpr});
    j["roc_points"] = std::move(points);
  }
  return j;
}

void write_roc_csv(std::ostream& out, const RocCurve& roc) {
  out << "fpr,tpr\n";
  for (const auto& pt : roc.points)
    out << csv::format_number(pt.fpr) << ',' << csv::format_number(pt.tpr) << '\n';
}

}  // namespace ransd::detect
