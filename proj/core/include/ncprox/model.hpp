#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ncprox/dataset.hpp"
#include "ncprox/regularizer.hpp"
#include "ncprox/rng.hpp"
#include "ncprox/types.hpp"

namespace ncprox {

enum class LossKind {
  NllsSigmoid,  ///< (b - sigmoid(a.x))^2, labels in {0, 1}
  TruncatedLS,  ///< (alpha/2) log(1 + (y - a.x)^2 / alpha)
  LeastSquares, ///< (1/2)(y - a.x)^2, a convex sanity anchor
};

std::string_view to_string(LossKind kind) noexcept;
LossKind loss_kind_from_string(std::string_view name);

struct SmoothLoss {
  LossKind kind = LossKind::NllsSigmoid;
  double alpha = 1.0;  ///< truncation value, TruncatedLS only

  static SmoothLoss nlls() { return {LossKind::NllsSigmoid, 1.0}; }
  static SmoothLoss truncated_ls(double alpha);
  static SmoothLoss least_squares() { return {LossKind::LeastSquares, 1.0}; }

  bool operator==(const SmoothLoss&) const = default;
};

/// sup |phi''(z)| of the scalar link, for b in {0, 1} and z real. The NLLS
/// value is the dense numerical maximum 0.154059 (attained at |z| ~ 0.4657)
/// rounded up to three significant figures.
inline constexpr double kNllsCurvatureBound = 0.155;
inline constexpr double kTlsCurvatureBound = 1.0;
inline constexpr double kLeastSquaresCurvatureBound = 1.0;

double curvature_bound(LossKind kind) noexcept;

/// Loss of one sample as a function of the margin z = a.x, and dphi/dz.
struct LinkEval {
  double value;
  double slope;
};

LinkEval link_loss(const SmoothLoss& loss, double z, double label) noexcept;

/// Smooth loss + regularizer over a dataset, together with the problem
/// constants used by step sizes, schedules, and bounds.
class Objective {
 public:
  /// L: gradient Lipschitz constant; sigma2: gradient-noise bound;
  /// f_x0: F at the initial point (upper bound on the optimality gap, since F >= 0).
  Objective(SmoothLoss loss, Regularizer reg, std::shared_ptr<const Dataset> data, double L,
            double sigma2 = 0.0, double f_x0 = 0.0);

  const SmoothLoss& loss() const noexcept { return loss_; }
  const Regularizer& reg() const noexcept { return reg_; }
  const Dataset& data() const noexcept { return *data_; }
  const std::shared_ptr<const Dataset>& data_ptr() const noexcept { return data_; }
  double L() const noexcept { return L_; }
  double sigma2() const noexcept { return sigma2_; }
  double f_x0() const noexcept { return f_x0_; }
  std::size_t n() const noexcept { return data_->n(); }
  std::size_t d() const noexcept { return data_->d(); }

  Objective with_sigma2(double sigma2) const;
  Objective with_f_x0(double f_x0) const;

 private:
  SmoothLoss loss_;
  Regularizer reg_;
  std::shared_ptr<const Dataset> data_;
  double L_;
  double sigma2_;
  double f_x0_;
};

/// Value and gradient of one sample; the gradient is stored sparsely on the
/// support of the sample's feature row.
struct SampleGrad {
  double value;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  Vector dense(std::size_t d) const;
};

SampleGrad sample_loss_grad(const Objective& obj, const Vector& x, std::size_t i);

/// out += scale * grad f_i(x). No bounds check on i.
void add_sample_grad(const Objective& obj, const Vector& x, std::size_t i, double scale,
                     Vector& out) noexcept;

/// Average gradient over `indices`, accumulated in the given order.
Vector batch_gradient(const Objective& obj, const Vector& x, std::span<const std::size_t> indices);

Vector full_gradient(const Objective& obj, const Vector& x);

/// (1/n) sum_i f_i(x), the smooth part only.
double full_loss(const Objective& obj, const Vector& x);

/// full_loss(x) + r(x).
double full_objective(const Objective& obj, const Vector& x);

/// Central differences of the smooth part.
Vector finite_diff_grad(const Objective& obj, const Vector& x, double h);
Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x, double h);

/// curvature_bound(loss) * max_i ||a_i||^2, floored at 1e-12 with a warning.
double estimate_smoothness(const SmoothLoss& loss, const Dataset& data);

/// (1 / (n_probe - 1)) sum_j ||grad f_{i_j}(x) - grad f(x)||^2 over n_probe
/// uniform draws with replacement.
double estimate_noise_variance(const Objective& obj, const Vector& x, std::size_t n_probe,
                               CounterRng& rng);

/// Builds an Objective with L from estimate_smoothness, F(x0), and sigma2
/// either supplied or estimated at x0 with n_probe draws.
Objective make_objective(SmoothLoss loss, Regularizer reg, std::shared_ptr<const Dataset> data,
                         const Vector& x0, std::optional<double> sigma2, CounterRng& rng,
                         std::size_t n_probe = 1000);

}  // namespace ncprox
