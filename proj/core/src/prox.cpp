#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "ncprox/error.hpp"
#include "ncprox/regularizer.hpp"

namespace ncprox {
namespace {

// Half thresholding: argmin_y (y - x)^2 + mu |y|^(1/2).
double half_threshold(double x, double mu) {
  const double ax = std::abs(x);
  const double thresh = std::cbrt(54.0 * mu * mu) / 4.0;
  if (ax <= thresh) return 0.0;
  const double phi = std::acos(mu / 8.0 * std::pow(ax / 3.0, -1.5));
  return 2.0 / 3.0 * x * (1.0 + std::cos(2.0 * std::numbers::pi / 3.0 - 2.0 * phi / 3.0));
}

// Two-thirds thresholding: argmin_y (y - x)^2 + mu |y|^(2/3).
double two_thirds_threshold(double x, double mu) {
  const double ax = std::abs(x);
  const double thresh = 2.0 / 3.0 * std::pow(3.0 * mu * mu * mu, 0.25);
  if (ax <= thresh) return 0.0;
  const double phi = std::acosh(27.0 * x * x / (16.0 * std::pow(mu, 1.5)));
  const double a = 2.0 / std::sqrt(3.0) * std::pow(mu, 0.25) * std::sqrt(std::cosh(phi / 3.0));
  const double root = (a + std::sqrt(std::max(0.0, 2.0 * ax / a - a * a))) / 2.0;
  return std::copysign(root * root * root, x);
}

double soft_threshold(double x, double t) {
  return std::copysign(std::max(std::abs(x) - t, 0.0), x);
}

// Each grid point q owns the Voronoi cell between its midpoints with its
// neighbours. Inside the cell the objective is a strictly convex quadratic
// minimised at (x + eta*lambda*q) / (1 + eta*lambda), which lies between x and q,
// so only the two cells adjacent to x and their shared boundary can win.
double quantization_prox(std::span<const double> grid, double lambda, double x, double eta) {
  const double el = eta * lambda;
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  auto cell_lo = [&](std::ptrdiff_t j) {
    return j == 0 ? -kInfinity : 0.5 * (grid[j - 1] + grid[j]);
  };
  auto cell_hi = [&](std::ptrdiff_t j) {
    return j == n - 1 ? kInfinity : 0.5 * (grid[j] + grid[j + 1]);
  };
  auto objective = [&](double y) {
    const double d = y - nearest_grid_point(grid, y);
    return prox_objective_1d(y, x, eta, 0.5 * lambda * d * d);
  };

  const auto upper = std::upper_bound(grid.begin(), grid.end(), x) - grid.begin();
  const std::ptrdiff_t hi_cell = std::min(upper, n - 1);
  const std::ptrdiff_t lo_cell = std::max<std::ptrdiff_t>(upper - 1, 0);

  double best_y = 0.0;
  double best_val = kInfinity;
  auto consider = [&](double y) {
    const double v = objective(y);
    if (v < best_val) {
      best_val = v;
      best_y = y;
    }
  };
  // Larger cell first so that exact ties keep the larger candidate.
  for (std::ptrdiff_t j : {hi_cell, lo_cell}) {
    const double q = grid[j];
    consider(std::clamp((x + el * q) / (1.0 + el), cell_lo(j), cell_hi(j)));
  }
  if (hi_cell != lo_cell) consider(cell_lo(hi_cell));
  return best_y;
}

}  // namespace

double prox_scalar(const Regularizer& r, double x, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("prox step eta must be positive");
  if (!std::isfinite(x)) throw InvalidInput("prox input must be finite");
  const double lambda = r.lambda();
  switch (r.kind()) {
    case RegKind::L0: return hard_threshold(x, 2.0 * eta * lambda);
    case RegKind::LHalf: return lambda == 0.0 ? x : half_threshold(x, 2.0 * eta * lambda);
    case RegKind::LTwoThirds:
      return lambda == 0.0 ? x : two_thirds_threshold(x, 2.0 * eta * lambda);
    case RegKind::QuantizationPenalty: return quantization_prox(r.grid(), lambda, x, eta);
    case RegKind::L1Baseline: return soft_threshold(x, eta * lambda);
    case RegKind::L0BallIndicator: break;
  }
  throw ContractViolation("prox_scalar called on a non-separable regularizer");
}

Vector project_l0_ball(const Vector& x, std::size_t k) {
  const auto d = static_cast<std::size_t>(x.size());
  if (k >= d) return x;
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  Vector out = Vector::Zero(x.size());
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = x[order[i]];
  return out;
}

Vector prox_apply(const Regularizer& r, const Vector& x, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidParameter("prox step eta must be positive");
  if (x.size() == 0) throw InvalidInput("prox_apply: empty vector");
  if (!x.allFinite()) throw InvalidInput("prox_apply: non-finite input");
  if (r.kind() == RegKind::L0BallIndicator) return project_l0_ball(x, r.radius());
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = prox_scalar(r, x[i], eta);
  return out;
}

double prox_oracle_1d(double x, double eta, const std::function<double(double)>& r_scalar,
                      double lo, double hi, std::size_t n_grid, bool refine) {
  if (!(lo < hi)) throw InvalidParameter("prox_oracle_1d: need lo < hi");
  if (n_grid < 1000) throw InvalidParameter("prox_oracle_1d: n_grid must be at least 1000");
  if (!(eta > 0.0)) throw InvalidParameter("prox_oracle_1d: eta must be positive");

  auto objective = [&](double y) { return prox_objective_1d(y, x, eta, r_scalar(y)); };
  const double span = hi - lo;
  const double last = static_cast<double>(n_grid - 1);
  // Scaling j / last first makes the midpoint of a symmetric interval exact.
  auto point = [&](std::size_t j) { return lo + span * (static_cast<double>(j) / last); };
  const double h = span / last;
  std::size_t best_j = 0;
  double best_val = kInfinity;
  for (std::size_t j = 0; j < n_grid; ++j) {
    const double v = objective(point(j));
    if (v < best_val) {
      best_val = v;
      best_j = j;
    }
  }
  double best_y = point(best_j);
  if (!refine) return best_y;

  // Golden-section pass over the neighbouring cells.
  double a = std::max(lo, best_y - h);
  double b = std::min(hi, best_y + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  const double y_ref = 0.5 * (a + b);
  if (objective(y_ref) < best_val) best_y = y_ref;
  return best_y;
}

}  // namespace ncprox
