#include "ransd/detect/standardize.hpp"

#include <cmath>

#include "ransd/common/error.hpp"

namespace ransd::detect {

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() == 0) throw Error(ErrorKind::DegenerateInput, "cannot standardize zero rows");
  const double n = static_cast<double>(x.rows());
  Standardizer s;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) s.mean[c] += x(r, c);
  for (double& m : s.mean) m /= n;
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(r, c) - s.mean[c];
      s.scale[c] += d * d;
    }
  for (double& v : s.scale) {
    v = std::sqrt(v / n);
    if (!(v > 0.0) || !std::isfinite(v)) v = 1.0;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size())
    throw Error(ErrorKind::DimensionMismatch, "standardizer width does not match input");
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
  return out;
}

nlohmann::ordered_json to_json(const Standardizer& s) {
  return {{"mean", s.mean}, {"scale", s.scale}};
}

Standardizer standardizer_from_json(const nlohmann::ordered_json& j) {
  try {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.scale = j.at("scale").get<std::vector<double>>();
    if (s.mean.size() != s.scale.size())
      throw Error(ErrorKind::Format, "standardizer mean and scale differ in length");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("standardizer: ") + e.what());
  }
}

}  // namespace ransd::detect
