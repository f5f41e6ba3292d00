#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace ransd::testing {

/// Eigenvalues of a symmetric 3x3 matrix, descending, from the roots of its characteristic
/// polynomial (trigonometric closed form, then Newton-polished on the cubic).
std::array<double, 3> cubic_eigenvalues(const std::array<std::array<double, 3>, 3>& a);

/// sum_x sum_y p(x,y) log2(p(x,y) / (p(x) p(y))) over a contingency table of counts.
double contingency_mi(const std::vector<std::vector<double>>& counts);
/// Same, starting from paired samples.
double contingency_mi(const std::vector<int>& x, const std::vector<int>& y);
double plug_in_entropy(const std::vector<int>& x);

/// Maximum of sum(a) - 1/2 a^T Q a subject to 0 <= a <= C and y^T a = 0, found by
/// enumerating which coordinates sit at 0, at C or strictly inside and solving the
/// stationarity system of every face. Q_ij = y_i y_j K_ij. Intended for n <= 9.
struct QpSolution {
  double objective;
  std::vector<double> alpha;
};
std::optional<QpSolution> brute_force_svm_dual(const std::vector<std::vector<double>>& kernel,
                                               const std::vector<int>& y_sign, double C);

/// Split minimising the weighted Gini impurity over every feature and midpoint.
struct OracleSplit {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};
OracleSplit exhaustive_best_split(const std::vector<std::vector<double>>& x,
                                  const std::vector<int>& y01, const std::vector<std::size_t>& rows);

/// P(score+ > score-) + 1/2 P(tie) over every positive/negative pair.
double pair_counting_auc(const std::vector<double>& scores, const std::vector<int>& y01);

/// Dense Gaussian elimination with partial pivoting; nullopt when a pivot is below `eps`.
std::optional<std::vector<double>> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                                                double eps = 1e-12);

}  // namespace ransd::testing
