#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ransd/common/labels.hpp"
#include "ransd/common/matrix.hpp"
#include "ransd/dynamic/vocabulary.hpp"

namespace ransd::features {

/// Plug-in entropy of a discrete sample, in bits.
double entropy_bits(std::span<const int> x);

/// Plug-in mutual information in bits over the observed joint cells.
/// Throws LengthMismatch when lengths differ, InvalidArgument when empty.
double mutual_information(std::span<const int> x, std::span<const int> y);

/// MI of a 2x2 table given as counts[x][y].
double mutual_information_2x2(const std::size_t counts[2][2]);

struct MiScoreTable {
  std::vector<double> scores;      // by feature index
  std::vector<std::size_t> order;  // descending score, ties by ascending index

  std::vector<std::size_t> top(std::size_t k) const;
};

/// Scores every vocabulary index against the row labels. Throws SingleClass.
MiScoreTable rank_by_mi(const std::vector<dynamic::SparseFeatureVector>& rows);

/// Scores each column of a discrete matrix (values cast to int). Throws SingleClass.
MiScoreTable rank_by_mi(const Matrix& discrete, std::span<const Label> labels);

std::vector<double> column_medians(const Matrix& x);

/// 1 where value > column median, else 0.
Matrix binarize_at(const Matrix& x, std::span<const double> thresholds);

/// `rank,feature_index,feature_name,mi_bits`
void write_mi_csv(std::ostream& out, const MiScoreTable& table,
                  const std::vector<std::string>& feature_names);

}  // namespace ransd::features
