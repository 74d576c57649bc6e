#include "ncprox/regularizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ncprox/error.hpp"

namespace ncprox {

std::string_view to_string(RegKind kind) noexcept {
  switch (kind) {
    case RegKind::L0: return "l0";
    case RegKind::LHalf: return "l_half";
    case RegKind::LTwoThirds: return "l_two_thirds";
    case RegKind::L0BallIndicator: return "l0_ball";
    case RegKind::QuantizationPenalty: return "quantization";
    case RegKind::L1Baseline: return "l1";
  }
  return "unknown";
}

RegKind reg_kind_from_string(std::string_view name) {
  for (RegKind k : {RegKind::L0, RegKind::LHalf, RegKind::LTwoThirds, RegKind::L0BallIndicator,
                    RegKind::QuantizationPenalty, RegKind::L1Baseline}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidParameter("unknown regularizer kind '" + std::string(name) + "'");
}

Regularizer::Regularizer(RegKind kind, double lambda, std::size_t k, std::vector<double> grid)
    : kind_(kind), lambda_(lambda), k_(k), grid_(std::move(grid)) {
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw InvalidParameter("regularizer lambda must be finite and nonnegative");
  }
  if (kind_ == RegKind::L0BallIndicator && k_ < 1) {
    throw InvalidParameter("l0-ball radius k must be at least 1");
  }
  if (kind_ == RegKind::QuantizationPenalty) {
    if (grid_.empty()) throw InvalidParameter("quantization grid must be nonempty");
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!std::isfinite(grid_[i])) throw InvalidParameter("quantization grid must be finite");
      if (i > 0 && !(grid_[i - 1] < grid_[i])) {
        throw InvalidParameter("quantization grid must be strictly increasing");
      }
    }
  }
}

Regularizer Regularizer::l0(double lambda) { return {RegKind::L0, lambda, 1, {}}; }
Regularizer Regularizer::l_half(double lambda) { return {RegKind::LHalf, lambda, 1, {}}; }
Regularizer Regularizer::l_two_thirds(double lambda) {
  return {RegKind::LTwoThirds, lambda, 1, {}};
}
Regularizer Regularizer::l0_ball(std::size_t k) { return {RegKind::L0BallIndicator, 0.0, k, {}}; }
Regularizer Regularizer::quantization(double lambda, std::vector<double> grid) {
  return {RegKind::QuantizationPenalty, lambda, 1, std::move(grid)};
}
Regularizer Regularizer::l1(double lambda) { return {RegKind::L1Baseline, lambda, 1, {}}; }

double Regularizer::scalar_value(double y) const {
  switch (kind_) {
    case RegKind::L0: return y != 0.0 ? lambda_ : 0.0;
    case RegKind::LHalf: return lambda_ * std::sqrt(std::abs(y));
    case RegKind::LTwoThirds: return lambda_ * std::cbrt(y * y);
    case RegKind::QuantizationPenalty: {
      const double d = y - nearest_grid_point(grid_, y);
      return 0.5 * lambda_ * d * d;
    }
    case RegKind::L1Baseline: return lambda_ * std::abs(y);
    case RegKind::L0BallIndicator: break;
  }
  throw ContractViolation("scalar_value called on a non-separable regularizer");
}

double nearest_grid_point(std::span<const double> grid, double x) noexcept {
  auto hi = std::lower_bound(grid.begin(), grid.end(), x);
  if (hi == grid.begin()) return *hi;
  if (hi == grid.end()) return grid.back();
  const double upper = *hi;
  const double lower = *(hi - 1);
  return (x - lower) < (upper - x) ? lower : upper;
}

Vector project_to_grid(std::span<const double> grid, const Vector& x) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = nearest_grid_point(grid, x[i]);
  return out;
}

std::size_t count_nonzeros(const Vector& x) noexcept {
  std::size_t nnz = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) nnz += x[i] != 0.0;
  return nnz;
}

double reg_value(const Regularizer& r, const Vector& x) {
  if (x.size() == 0) throw InvalidInput("reg_value: empty vector");
  if (!x.allFinite()) throw InvalidInput("reg_value: non-finite input");
  if (r.kind() == RegKind::L0BallIndicator) {
    return count_nonzeros(x) <= r.radius() ? 0.0 : kInfinity;
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) total += r.scalar_value(x[i]);
  return total;
}

}  // namespace ncprox
