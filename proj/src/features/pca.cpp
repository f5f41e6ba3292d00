#include "ransd/features/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ransd/common/csv.hpp"
#include "ransd/common/error.hpp"

namespace ransd::features {
namespace {

constexpr double kOffDiagonalTolerance = 1e-12;
constexpr std::size_t kMaxSweeps = 100;

double max_off_diagonal(const Matrix& a) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p)
    for (std::size_t q = p + 1; q < a.cols(); ++q) m = std::max(m, std::abs(a(p, q)));
  return m;
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.rows();
  if (n != input.cols()) throw Error(ErrorKind::DimensionMismatch, "eigendecomposition needs a square matrix");
  Matrix a = input;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double tol = kOffDiagonalTolerance * std::max(1.0, frobenius(a));
  std::size_t sweeps = 0;
  while (max_off_diagonal(a) > tol) {
    if (sweeps++ == kMaxSweeps)
      throw Error(ErrorKind::NonFinite, "Jacobi iteration did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (a(p, q) != 0.0) rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out;
  out.sweeps = sweeps;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.values[col] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t k = 1; k < n; ++k)
      if (std::abs(v(k, src)) > std::abs(v(lead, src))) lead = k;
    const double sign = v(lead, src) < 0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, col) = sign * v(k, src);
  }
  return out;
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
  for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

Matrix covariance(const Matrix& x, std::span<const double> mean) {
  const std::size_t d = x.cols();
  Matrix cov(d, d);
  std::vector<double> centred(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) centred[c] = x(r, c) - mean[c];
    for (std::size_t i = 0; i < d; ++i) {
      if (centred[i] == 0.0) continue;
      for (std::size_t j = i; j < d; ++j) cov(i, j) += centred[i] * centred[j];
    }
  }
  const double n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) cov(j, i) = cov(i, j) /= n;
  return cov;
}

PcaModel fit_pca(const Matrix& x) {
  if (x.rows() < 2 || x.cols() < 1)
    throw Error(ErrorKind::DegenerateInput, "PCA needs at least two samples and one feature");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "PCA input contains NaN or infinity");

  PcaModel model;
  model.mean = column_means(x);
  auto eig = symmetric_eigen(covariance(x, model.mean));
  model.eigenvalues = std::move(eig.values);
  model.components = std::move(eig.vectors);

  // Rounding can leave tiny negative eigenvalues; they carry no variance.
  double total = 0.0;
  for (double a : model.eigenvalues) total += std::max(a, 0.0);
  model.explained_variance_ratio.resize(model.eigenvalues.size(), 0.0);
  if (total > 0.0)
    for (std::size_t i = 0; i < model.eigenvalues.size(); ++i)
      model.explained_variance_ratio[i] = std::max(model.eigenvalues[i], 0.0) / total;
  return model;
}

Matrix transform(const PcaModel& model, const Matrix& x) {
  const std::size_t d = model.dimension();
  if (x.cols() != d) throw Error(ErrorKind::DimensionMismatch, "PCA transform column count");
  Matrix z(x.rows(), d);
  std::vector<double> centred(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) centred[c] = x(r, c) - model.mean[c];
    for (std::size_t k = 0; k < d; ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += model.components(c, k) * centred[c];
      z(r, k) = s;
    }
  }
  return z;
}

Matrix inverse_transform(const PcaModel& model, const Matrix& z) {
  const std::size_t d = model.dimension();
  if (z.cols() > d) throw Error(ErrorKind::DimensionMismatch, "more scores than components");
  Matrix x(z.rows(), d);
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) {
      double s = model.mean[c];
      for (std::size_t k = 0; k < z.cols(); ++k) s += model.components(c, k) * z(r, k);
      x(r, c) = s;
    }
  return x;
}

std::size_t components_for_variance(const PcaModel& model, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "variance threshold must lie in (0, 1]");
  // Accumulated rounding must not push a threshold of 1.0 past the last non-zero component.
  constexpr double slack = 1e-12;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < model.explained_variance_ratio.size(); ++k) {
    cumulative += model.explained_variance_ratio[k];
    if (cumulative >= threshold - slack) return k + 1;
  }
  return 0;  // zero total variance
}

std::vector<ScreePoint> scree(const PcaModel& model) {
  std::vector<ScreePoint> out;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < model.eigenvalues.size(); ++k) {
    cumulative += model.explained_variance_ratio[k];
    out.push_back({k + 1, model.eigenvalues[k], std::min(cumulative, 1.0)});
  }
  return out;
}

void write_scree_csv(std::ostream& out, const std::vector<ScreePoint>& points) {
  out << "component,eigenvalue,cumulative_ratio\n";
  for (const auto& p : points)
    out << p.component << ',' << csv::format_number(p.eigenvalue) << ','
        << csv::format_number(p.cumulative_ratio) << '\n';
}

}  // namespace ransd::features
