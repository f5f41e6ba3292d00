#include "ransd/features/mutual_information.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"

namespace ransd::features {
namespace {

MiScoreTable order_scores(std::vector<double> scores) {
  MiScoreTable t;
  t.scores = std::move(scores);
  t.order.resize(t.scores.size());
  std::iota(t.order.begin(), t.order.end(), 0);
  std::stable_sort(t.order.begin(), t.order.end(),
                   [&](std::size_t a, std::size_t b) { return t.scores[a] > t.scores[b]; });
  return t;
}

}  // namespace

double entropy_bits(std::span<const int> x) {
  if (x.empty()) return 0.0;
  std::map<int, std::size_t> counts;
  for (int v : x) ++counts[v];
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double mutual_information(std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size())
    throw Error(ErrorKind::LengthMismatch, "mutual information needs equal-length inputs");
  if (x.empty()) throw Error(ErrorKind::InvalidArgument, "mutual information of empty samples");
  std::map<std::pair<int, int>, std::size_t> joint;
  std::map<int, std::size_t> px, py;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++joint[{x[i], y[i]}];
    ++px[x[i]];
    ++py[y[i]];
  }
  const double n = static_cast<double>(x.size());
  double mi = 0.0;
  for (const auto& [cell, c] : joint) {
    const double cxy = static_cast<double>(c);
    const double cx = static_cast<double>(px[cell.first]);
    const double cy = static_cast<double>(py[cell.second]);
    mi += (cxy / n) * std::log2(cxy * n / (cx * cy));
  }
  return std::max(mi, 0.0);
}

double mutual_information_2x2(const std::size_t counts[2][2]) {
  const double n = static_cast<double>(counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]);
  if (n == 0) return 0.0;
  double mi = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      if (counts[a][b] == 0) continue;
      const double cxy = static_cast<double>(counts[a][b]);
      const double cx = static_cast<double>(counts[a][0] + counts[a][1]);
      const double cy = static_cast<double>(counts[0][b] + counts[1][b]);
      mi += (cxy / n) * std::log2(cxy * n / (cx * cy));
    }
  return std::max(mi, 0.0);
}

std::vector<std::size_t> MiScoreTable::top(std::size_t k) const {
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size()))};
}

MiScoreTable rank_by_mi(const std::vector<dynamic::SparseFeatureVector>& rows) {
  if (rows.size() < 2) throw Error(ErrorKind::SingleClass, "MI ranking needs at least two samples");
  std::vector<Label> labels;
  for (const auto& r : rows) {
    if (!r.label) throw Error(ErrorKind::InvalidArgument, "MI ranking needs labelled rows");
    labels.push_back(*r.label);
  }
  require_both_classes(labels, "MI ranking");

  const std::size_t d = rows.front().dimension;
  // active[i][y]: rows with feature i present and label y
  std::vector<std::array<std::size_t, 2>> active(d, {0, 0});
  std::array<std::size_t, 2> class_total{0, 0};
  for (const auto& r : rows) {
    const int y = to_bit(*r.label);
    ++class_total[y];
    for (std::size_t i : r.active) ++active.at(i)[y];
  }
  std::vector<double> scores(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t counts[2][2] = {
        {class_total[0] - active[i][0], class_total[1] - active[i][1]},
        {active[i][0], active[i][1]},
    };
    scores[i] = mutual_information_2x2(counts);
  }
  return order_scores(std::move(scores));
}

MiScoreTable rank_by_mi(const Matrix& discrete, std::span<const Label> labels) {
  if (discrete.rows() != labels.size())
    throw Error(ErrorKind::LengthMismatch, "MI ranking rows vs labels");
  if (labels.size() < 2) throw Error(ErrorKind::SingleClass, "MI ranking needs at least two samples");
  require_both_classes(labels, "MI ranking");
  const auto y = to_bits(labels);
  std::vector<double> scores(discrete.cols());
  std::vector<int> x(discrete.rows());
  for (std::size_t c = 0; c < discrete.cols(); ++c) {
    for (std::size_t r = 0; r < discrete.rows(); ++r) x[r] = static_cast<int>(discrete(r, c));
    scores[c] = mutual_information(x, y);
  }
  return order_scores(std::move(scores));
}

std::vector<double> column_medians(const Matrix& x) {
  std::vector<double> medians(x.cols(), 0.0);
  if (x.rows() == 0) return medians;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    auto col = x.column(c);
    std::sort(col.begin(), col.end());
    const std::size_t mid = col.size() / 2;
    medians[c] = col.size() % 2 ? col[mid] : 0.5 * (col[mid - 1] + col[mid]);
  }
  return medians;
}

Matrix binarize_at(const Matrix& x, std::span<const double> thresholds) {
  if (thresholds.size() != x.cols()) throw Error(ErrorKind::DimensionMismatch, "binarize thresholds");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) > thresholds[c] ? 1.0 : 0.0;
  return out;
}

void write_mi_csv(std::ostream& out, const MiScoreTable& table,
                  const std::vector<std::string>& feature_names) {
  out << "rank,feature_index,feature_name,mi_bits\n";
  for (std::size_t rank = 0; rank < table.order.size(); ++rank) {
    const std::size_t i = table.order[rank];
    csv::write_row(out, {std::to_string(rank + 1), std::to_string(i),
                         i < feature_names.size() ? feature_names[i] : std::to_string(i),
                         csv::format_number(table.scores[i])});
  }
}

}  // namespace ransd::features
