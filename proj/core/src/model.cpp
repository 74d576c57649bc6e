#include "ncprox/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncprox/error.hpp"
#include "ncprox/log.hpp"

namespace ncprox {
namespace {

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_point(const Objective& obj, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != obj.d()) {
    throw InvalidInput("point has dimension " + std::to_string(x.size()) + ", expected " +
                       std::to_string(obj.d()));
  }
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::NllsSigmoid: return "nlls";
    case LossKind::TruncatedLS: return "tls";
    case LossKind::LeastSquares: return "ls";
  }
  return "unknown";
}

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "nlls") return LossKind::NllsSigmoid;
  if (name == "tls") return LossKind::TruncatedLS;
  if (name == "ls") return LossKind::LeastSquares;
  throw InvalidParameter("unknown loss kind '" + std::string(name) + "'");
}

SmoothLoss SmoothLoss::truncated_ls(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("truncation alpha must be positive");
  }
  return {LossKind::TruncatedLS, alpha};
}

double curvature_bound(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::NllsSigmoid: return kNllsCurvatureBound;
    case LossKind::TruncatedLS: return kTlsCurvatureBound;
    case LossKind::LeastSquares: return kLeastSquaresCurvatureBound;
  }
  return kTlsCurvatureBound;
}

LinkEval link_loss(const SmoothLoss& loss, double z, double label) noexcept {
  if (loss.kind == LossKind::NllsSigmoid) {
    const double s = sigmoid(z);
    const double resid = label - s;
    return {resid * resid, -2.0 * resid * s * (1.0 - s)};
  }
  const double rho = label - z;
  if (loss.kind == LossKind::LeastSquares) return {0.5 * rho * rho, -rho};
  const double ratio = rho * rho / loss.alpha;
  return {0.5 * loss.alpha * std::log1p(ratio), -rho / (1.0 + ratio)};
}

Objective::Objective(SmoothLoss loss, Regularizer reg, std::shared_ptr<const Dataset> data,
                     double L, double sigma2, double f_x0)
    : loss_(loss), reg_(std::move(reg)), data_(std::move(data)), L_(L), sigma2_(sigma2), f_x0_(f_x0) {
  if (!data_) throw InvalidInput("objective requires a dataset");
  if (loss_.kind == LossKind::TruncatedLS && !(loss_.alpha > 0.0)) {
    throw InvalidParameter("truncation alpha must be positive");
  }
  if (!(L_ > 0.0) || !std::isfinite(L_)) throw InvalidParameter("smoothness constant L must be positive");
  if (!(sigma2_ >= 0.0) || !std::isfinite(sigma2_)) {
    throw InvalidParameter("noise variance sigma2 must be nonnegative");
  }
}

Objective Objective::with_sigma2(double sigma2) const {
  return {loss_, reg_, data_, L_, sigma2, f_x0_};
}

Objective Objective::with_f_x0(double f_x0) const {
  return {loss_, reg_, data_, L_, sigma2_, f_x0};
}

Vector SampleGrad::dense(std::size_t d) const {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t k = 0; k < indices.size(); ++k) g[indices[k]] = values[k];
  return g;
}

SampleGrad sample_loss_grad(const Objective& obj, const Vector& x, std::size_t i) {
  if (i >= obj.n()) {
    throw IndexOutOfRange("sample index " + std::to_string(i) + " out of range [0, " +
                          std::to_string(obj.n()) + ")");
  }
  check_point(obj, x);
  const SparseRow row = obj.data().row(i);
  const LinkEval e = link_loss(obj.loss(), row.dot(x), obj.data().label(i));
  SampleGrad out{e.value, {row.indices.begin(), row.indices.end()}, {}};
  out.values.reserve(row.values.size());
  for (double v : row.values) out.values.push_back(e.slope * v);
  return out;
}

void add_sample_grad(const Objective& obj, const Vector& x, std::size_t i, double scale,
                     Vector& out) noexcept {
  const SparseRow row = obj.data().row(i);
  const LinkEval e = link_loss(obj.loss(), row.dot(x), obj.data().label(i));
  row.axpy(scale * e.slope, out);
}

Vector batch_gradient(const Objective& obj, const Vector& x, std::span<const std::size_t> indices) {
  check_point(obj, x);
  if (indices.empty()) throw InvalidParameter("batch must contain at least one sample");
  Vector g = Vector::Zero(x.size());
  for (std::size_t i : indices) {
    if (i >= obj.n()) throw IndexOutOfRange("sample index " + std::to_string(i) + " out of range");
    add_sample_grad(obj, x, i, 1.0, g);
  }
  g /= static_cast<double>(indices.size());
  return g;
}

Vector full_gradient(const Objective& obj, const Vector& x) {
  check_point(obj, x);
  Vector g = Vector::Zero(x.size());
  for (std::size_t i = 0; i < obj.n(); ++i) add_sample_grad(obj, x, i, 1.0, g);
  g /= static_cast<double>(obj.n());
  return g;
}

double full_loss(const Objective& obj, const Vector& x) {
  check_point(obj, x);
  double total = 0.0;
  for (std::size_t i = 0; i < obj.n(); ++i) {
    const SparseRow row = obj.data().row(i);
    total += link_loss(obj.loss(), row.dot(x), obj.data().label(i)).value;
  }
  return total / static_cast<double>(obj.n());
}

double full_objective(const Objective& obj, const Vector& x) {
  return full_loss(obj, x) + reg_value(obj.reg(), x);
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw InvalidParameter("finite difference step must be positive");
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = f(probe);
    probe[j] = x[j] - h;
    const double down = f(probe);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

Vector finite_diff_grad(const Objective& obj, const Vector& x, double h) {
  check_point(obj, x);
  return finite_diff_grad([&](const Vector& p) { return full_loss(obj, p); }, x, h);
}

double estimate_smoothness(const SmoothLoss& loss, const Dataset& data) {
  if (data.n() == 0) throw InvalidInput("estimate_smoothness: empty dataset");
  double max_sq = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) max_sq = std::max(max_sq, data.row(i).squared_norm());
  const double L = curvature_bound(loss.kind) * max_sq;
  constexpr double kFloor = 1e-12;
  if (L < kFloor) {
    warn("all feature rows are zero; smoothness constant floored at 1e-12");
    return kFloor;
  }
  return L;
}

double estimate_noise_variance(const Objective& obj, const Vector& x, std::size_t n_probe,
                               CounterRng& rng) {
  if (n_probe < 2) throw InvalidParameter("estimate_noise_variance: n_probe must be at least 2");
  const Vector g = full_gradient(obj, x);
  const double g_sq = g.squaredNorm();
  double total = 0.0;
  for (std::size_t j = 0; j < n_probe; ++j) {
    const std::size_t i = rng.uniform_index(obj.n());
    const SparseRow row = obj.data().row(i);
    const double slope = link_loss(obj.loss(), row.dot(x), obj.data().label(i)).slope;
    // ||s a - g||^2 = ||g||^2 + sum_k (s a_k - g_k)^2 - g_k^2 over the row support.
    double sq = g_sq;
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      const double gk = g[row.indices[k]];
      const double diff = slope * row.values[k] - gk;
      sq += diff * diff - gk * gk;
    }
    total += std::max(sq, 0.0);
  }
  return total / static_cast<double>(n_probe - 1);
}

Objective make_objective(SmoothLoss loss, Regularizer reg, std::shared_ptr<const Dataset> data,
                         const Vector& x0, std::optional<double> sigma2, CounterRng& rng,
                         std::size_t n_probe) {
  if (!data) throw InvalidInput("make_objective: dataset required");
  const double L = estimate_smoothness(loss, *data);
  Objective obj(loss, std::move(reg), std::move(data), L);
  const double f0 = full_objective(obj, x0);
  const double s2 = sigma2 ? *sigma2 : estimate_noise_variance(obj, x0, n_probe, rng);
  return Objective(obj.loss(), obj.reg(), obj.data_ptr(), L, s2, f0);
}

}  // namespace ncprox
