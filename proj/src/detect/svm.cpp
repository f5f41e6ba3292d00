#include "ransd/detect/svm.hpp"

#include <cmath>
#include <limits>

#include "ransd/common/error.hpp"

namespace ransd::detect {
namespace {

constexpr double kTau = 1e-12;
// Above this many samples kernel rows are recomputed instead of cached in full.
constexpr std::size_t kFullCacheLimit = 4000;

class KernelRows {
 public:
  KernelRows(const Matrix& x, const Kernel& kernel) : x_(x), kernel_(kernel), n_(x.rows()) {
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_(x_.row(i), x_.row(i));
    if (n_ <= kFullCacheLimit) {
      full_ = Matrix(n_, n_);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i; j < n_; ++j) full_(i, j) = full_(j, i) = kernel_(x_.row(i), x_.row(j));
    }
  }

  std::span<const double> row(std::size_t i, std::vector<double>& scratch) const {
    if (!full_.empty()) return full_.row(i);
    scratch.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) scratch[j] = kernel_(x_.row(i), x_.row(j));
    return scratch;
  }

  double diag(std::size_t i) const { return diag_[i]; }

 private:
  const Matrix& x_;
  Kernel kernel_;
  std::size_t n_;
  std::vector<double> diag_;
  Matrix full_;
};

}  // namespace

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  double s = 0.0;
  if (type == KernelType::Linear) {
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

SvmModel train_svm(const Matrix& x, std::span<const Label> labels, const SvmParams& params) {
  const std::size_t n = x.rows();
  if (labels.size() != n) throw Error(ErrorKind::LengthMismatch, "SVM rows vs labels");
  if (!(params.C > 0.0)) throw Error(ErrorKind::InvalidArgument, "SVM penalty C must be positive");
  if (params.kernel.type == KernelType::Rbf && !(params.kernel.gamma > 0.0))
    throw Error(ErrorKind::InvalidArgument, "RBF gamma must be positive");
  require_both_classes(labels, "SVM training");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "SVM input contains NaN or infinity");

  const double C = params.C;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = to_sign(labels[i]);
  const KernelRows K(x, params.kernel);

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a^T Q a - e^T a
  std::vector<double> scratch_i, scratch_j;

  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C); };

  std::size_t iter = 0;
  double gap = 0.0;
  for (; iter < params.max_iterations; ++iter) {
    // i: maximal violator in I_up
    double g_max = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (in_up(t) && -y[t] * grad[t] >= g_max) {
        g_max = -y[t] * grad[t];
        i = t;
      }
    if (i == n) break;
    const auto Ki = K.row(i, scratch_i);

    // j: second-order choice in I_low
    double g_max2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double yg = y[t] * grad[t];
      g_max2 = std::max(g_max2, yg);
      const double b = g_max + yg;
      if (b > 0) {
        double a = K.diag(i) + K.diag(t) - 2.0 * Ki[t];
        if (a <= 0) a = kTau;
        const double obj = -(b * b) / a;
        if (obj <= best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    gap = g_max + g_max2;
    if (gap < params.tolerance || j == n) break;
    const auto Kj = K.row(j, scratch_j);

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double Qij = y[i] * y[j] * Ki[j];
    if (y[i] != y[j]) {
      double quad = K.diag(i) + K.diag(j) + 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = C + diff; }
      }
    } else {
      double quad = K.diag(i) + K.diag(j) - 2.0 * Qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (y[i] * Ki[t] * di + y[j] * Kj[t] * dj);
  }

  // Offset from free vectors, or the midpoint of the feasible interval when none are free.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

  SvmModel model;
  model.kernel = params.kernel;
  model.C = C;
  model.dimension = x.cols();
  model.bias = -rho;
  model.alpha = alpha;
  model.iterations = iter;
  model.kkt_gap = gap;
  double obj = 0.0;
  for (std::size_t t = 0; t < n; ++t) obj += alpha[t] * (grad[t] - 1.0);
  model.dual_objective = -0.5 * obj;

  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0) sv.push_back(t);
  model.support_vectors = x.select_rows(sv);
  for (std::size_t t : sv) model.coefficients.push_back(alpha[t] * y[t]);
  return model;
}

double svm_decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dimension)
    throw Error(ErrorKind::DimensionMismatch, "SVM input has " + std::to_string(x.size()) +
                                                  " features, model expects " +
                                                  std::to_string(model.dimension));
  double s = model.bias;
  for (std::size_t i = 0; i < model.coefficients.size(); ++i)
    s += model.coefficients[i] * model.kernel(model.support_vectors.row(i), x);
  return s;
}

Label svm_predict(const SvmModel& model, std::span<const double> x) {
  return svm_decision(model, x) > 0 ? Label::Malicious : Label::Benign;
}

nlohmann::ordered_json to_json(const SvmModel& m) {
  nlohmann::ordered_json j;
  j["kernel"] = m.kernel.type == KernelType::Rbf ? "rbf" : "linear";
  if (m.kernel.type == KernelType::Rbf) j["gamma"] = m.kernel.gamma;
  j["C"] = m.C;
  j["dimension"] = m.dimension;
  j["bias"] = m.bias;
  j["coefficients"] = m.coefficients;
  auto svs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.support_vectors.rows(); ++i) {
    auto r = m.support_vectors.row(i);
    svs.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["support_vectors"] = std::move(svs);
  return j;
}

SvmModel svm_from_json(const nlohmann::ordered_json& j) {
  try {
    SvmModel m;
    const auto kernel = j.at("kernel").get<std::string>();
    if (kernel == "rbf")
      m.kernel = Kernel::rbf(j.at("gamma").get<double>());
    else if (kernel == "linear")
      m.kernel = Kernel::linear();
    else
      throw Error(ErrorKind::Format, "unknown kernel " + kernel);
    m.C = j.at("C").get<double>();
    m.dimension = j.at("dimension").get<std::size_t>();
    m.bias = j.at("bias").get<double>();
    m.coefficients = j.at("coefficients").get<std::vector<double>>();
    const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    if (rows.size() != m.coefficients.size())
      throw Error(ErrorKind::Format, "support vector count does not match coefficients");
    m.support_vectors = rows.empty() ? Matrix(0, m.dimension) : Matrix::from_rows(rows);
    if (m.support_vectors.cols() != m.dimension)
      throw Error(ErrorKind::Format, "support vector width does not match dimension");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("SVM model: ") + e.what());
  }
}

}  // namespace ransd::detect
