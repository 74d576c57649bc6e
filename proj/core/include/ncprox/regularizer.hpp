#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "ncprox/types.hpp"

namespace ncprox {

enum class RegKind {
  L0,                   ///< lambda * ||x||_0
  LHalf,                ///< lambda * sum |x_i|^(1/2)
  LTwoThirds,           ///< lambda * sum |x_i|^(2/3)
  L0BallIndicator,      ///< indicator of {||x||_0 <= k}
  QuantizationPenalty,  ///< (lambda/2) * sum dist(x_i, grid)^2
  L1Baseline,           ///< lambda * ||x||_1
};

std::string_view to_string(RegKind kind) noexcept;
RegKind reg_kind_from_string(std::string_view name);

/// Value used for an indicator outside its feasible set.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Tagged description of a (possibly non-convex, non-smooth) regularizer.
/// Construct through the named factories; they validate parameters.
class Regularizer {
 public:
  static Regularizer l0(double lambda);
  static Regularizer l_half(double lambda);
  static Regularizer l_two_thirds(double lambda);
  static Regularizer l0_ball(std::size_t k);
  static Regularizer quantization(double lambda, std::vector<double> grid);
  static Regularizer l1(double lambda);

  RegKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  std::size_t radius() const noexcept { return k_; }
  std::span<const double> grid() const noexcept { return grid_; }

  /// True for every kind except L0BallIndicator.
  bool separable() const noexcept { return kind_ != RegKind::L0BallIndicator; }

  /// Per-coordinate value for separable kinds.
  double scalar_value(double y) const;

  bool operator==(const Regularizer&) const = default;

 private:
  Regularizer(RegKind kind, double lambda, std::size_t k, std::vector<double> grid);

  RegKind kind_;
  double lambda_;
  std::size_t k_;
  std::vector<double> grid_;
};

/// r(x). Returns kInfinity for an infeasible L0BallIndicator argument.
double reg_value(const Regularizer& r, const Vector& x);

/// An element of argmin_y (1/(2 eta)) ||y - x||^2 + r(y).
///
/// Tie rules: hard thresholding returns 0 when x_i^2 == 2 eta lambda (same for
/// the half and two-thirds thresholds), the l0-ball projection keeps the
/// lowest index among equal magnitudes, and quantization prefers the larger
/// grid cell on an exact tie.
Vector prox_apply(const Regularizer& r, const Vector& x, double eta);

/// Scalar prox for separable kinds.
double prox_scalar(const Regularizer& r, double x, double eta);

/// Hard thresholding with an explicit squared threshold; y = x if x^2 > thresh_sq.
inline double hard_threshold(double x, double thresh_sq) noexcept {
  return x * x > thresh_sq ? x : 0.0;
}

/// Keep the k largest magnitudes, zero the rest (lowest index wins ties).
Vector project_l0_ball(const Vector& x, std::size_t k);

/// Nearest element of a sorted grid; an exact midpoint goes to the larger point.
double nearest_grid_point(std::span<const double> grid, double x) noexcept;

/// Coordinatewise nearest-grid projection.
Vector project_to_grid(std::span<const double> grid, const Vector& x);

/// Number of nonzero coordinates.
std::size_t count_nonzeros(const Vector& x) noexcept;

/// Brute-force one-dimensional prox used to verify the closed forms.
///
/// Evaluates (1/(2 eta)) (y - x)^2 + r_scalar(y) on n_grid uniform points of
/// [lo, hi], then runs a golden-section pass over the two neighbouring cells
/// of the best grid point when `refine` is set. Requires lo < hi and
/// n_grid >= 1000.
double prox_oracle_1d(double x, double eta, const std::function<double(double)>& r_scalar,
                      double lo, double hi, std::size_t n_grid, bool refine = true);

/// (1/(2 eta)) (y - x)^2 + r_scalar(y).
inline double prox_objective_1d(double y, double x, double eta, double r_of_y) noexcept {
  const double diff = y - x;
  return diff * diff / (2.0 * eta) + r_of_y;
}

}  // namespace ncprox
