#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "ransd/common/matrix.hpp"

namespace ransd::features {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Iterates until every
/// off-diagonal magnitude is below 1e-12 (scaled by the Frobenius norm when it exceeds 1).
/// Columns are normalised so their largest-magnitude entry is positive.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Column means.
std::vector<double> column_means(const Matrix& x);

/// Sample covariance with 1/N normalisation.
Matrix covariance(const Matrix& x, std::span<const double> mean);

struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // d x d, orthonormal columns
  std::vector<double> eigenvalues;
  std::vector<double> explained_variance_ratio;

  std::size_t dimension() const { return mean.size(); }
};

/// Throws DegenerateInput (fewer than two rows or no columns) or NonFinite.
PcaModel fit_pca(const Matrix& x);

/// z = W^T (x - mean) for every row. Throws DimensionMismatch.
Matrix transform(const PcaModel& model, const Matrix& x);

/// x = mean + W z, using the first z.cols() components.
Matrix inverse_transform(const PcaModel& model, const Matrix& z);

/// Smallest k whose cumulative explained-variance ratio reaches `threshold` in (0, 1].
std::size_t components_for_variance(const PcaModel& model, double threshold);

struct ScreePoint {
  std::size_t component;  // 1-based
  double eigenvalue;
  double cumulative_ratio;
};

std::vector<ScreePoint> scree(const PcaModel& model);

/// `component,eigenvalue,cumulative_ratio`
void write_scree_csv(std::ostream& out, const std::vector<ScreePoint>& points);

}  // namespace ransd::features
