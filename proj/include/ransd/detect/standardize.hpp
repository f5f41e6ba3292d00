#pragma once

#include <vector>

#include "json.hpp"
#include "ransd/common/matrix.hpp"

namespace ransd::detect {

/// Zero-mean / unit-variance scaling learned from a training matrix.
/// Constant columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

nlohmann::ordered_json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const nlohmann::ordered_json& j);

}  // namespace ransd::detect
