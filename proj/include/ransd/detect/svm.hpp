#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "ransd/common/labels.hpp"
#include "ransd/common/matrix.hpp"

namespace ransd::detect {

enum class KernelType { Linear, Rbf };

struct Kernel {
  KernelType type = KernelType::Linear;
  double gamma = 0.0;  // rbf only

  static Kernel linear() { return {KernelType::Linear, 0.0}; }
  static Kernel rbf(double gamma) { return {KernelType::Rbf, gamma}; }

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

struct SvmParams {
  Kernel kernel = Kernel::linear();
  double C = 1.0;
  // Stop when the maximal KKT violation (m - M) drops below this.
  double tolerance = 1e-5;
  std::size_t max_iterations = 10'000'000;
};

struct SvmModel {
  Kernel kernel;
  double C = 1.0;
  std::size_t dimension = 0;
  Matrix support_vectors;
  std::vector<double> coefficients;  // alpha_i * y_i
  double bias = 0.0;

  // Training diagnostics.
  std::vector<double> alpha;  // full dual vector over the training set
  double dual_objective = 0.0;  // sum(alpha) - 1/2 alpha^T Q alpha
  double kkt_gap = 0.0;
  std::size_t iterations = 0;
};

/// Soft-margin dual solved by two-coordinate updates with second-order pair selection.
/// Throws SingleClass, NonFinite, InvalidArgument (C <= 0, gamma <= 0 for rbf), LengthMismatch.
SvmModel train_svm(const Matrix& x, std::span<const Label> labels, const SvmParams& params);

/// Signed distance-like score; positive means malicious. Throws DimensionMismatch.
double svm_decision(const SvmModel& model, std::span<const double> x);
Label svm_predict(const SvmModel& model, std::span<const double> x);

nlohmann::ordered_json to_json(const SvmModel& model);
SvmModel svm_from_json(const nlohmann::ordered_json& j);

}  // namespace ransd::detect
