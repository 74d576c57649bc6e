#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace ncprox {

/// Constants appearing in the stationarity bounds for step size eta = c / L.
struct BoundConstants {
  double L = 0.0;
  double c = 0.0;
  double eta = 0.0;
  double c1 = 0.0;          ///< (2c(1-2c)+2) / (c(1-2c)); meaningful for c < 1/2
  double c2 = 0.0;          ///< (6-4c) / (1-2c); meaningful for c < 1/2
  double gamma = 0.0;       ///< 4L^2 + 1/eta^2 + 2L/eta
  double theta = 0.0;       ///< (1 - 3 eta L) / (2 eta); positive iff c < 1/3
  double pgd_factor = 0.0;  ///< 4(eta^2 L^2 + 1) / (eta (1 - eta L)); positive iff c < 1

  /// Evaluates every constant; entries outside their c range are left as
  /// computed (possibly nonpositive or infinite). Requires L > 0 and c > 0.
  static BoundConstants from(double c, double L);
};

enum class BoundKind { Thm1, Thm2, Thm3Online, Thm3FiniteSum, Thm4Online, Thm4FiniteSum };

std::string_view to_string(BoundKind kind) noexcept;

struct BoundInputs {
  double T = 0.0;                       ///< iterations
  std::optional<double> s1_size;        ///< |S1| (Thm3Online) or fixed batch m (Thm2)
  std::optional<double> b;              ///< increasing-batch base (Thm2 with m_t = b(t+1), Thm4Online)
  double sigma2 = 0.0;
  double delta_ub = 0.0;                ///< upper bound on F(x0) - F(x*), e.g. F(x0)
};

/// Right-hand side of the stationarity bound on E[dist(0, dF(x_R))^2].
///
/// Thm2 accepts either a fixed batch (s1_size; variance term c1 sigma^2 / m)
/// or an increasing batch (b; c1 sigma^2 (log T + 1) / (b T)). Thm4Online uses
/// the final form with (log(2T/b)/2 + 1) / (2 b theta L T). Throws
/// InvalidParameter naming the violated range when theta <= 0 or c is out of
/// the admissible interval of the bound.
double theoretical_bound(BoundKind which, const BoundConstants& consts, const BoundInputs& in);

/// Iterations T making the PGD bound equal eps^2.
double pgd_horizon(const BoundConstants& k, double delta_ub, double eps);
/// T = 2 c2 Delta / (eta eps^2) for the fixed-batch mini-batch method.
double mbspg_horizon(const BoundConstants& k, double delta_ub, double eps);
/// |S1| = (gamma + 4 theta L) sigma^2 / (theta L eps^2) for the online recursive method.
double spgr_online_anchor_size(const BoundConstants& k, double sigma2, double eps);
/// T = 2(2 theta + gamma eta) Delta / (eta theta eps^2) online,
/// (2 theta + gamma eta) Delta / (eta theta eps^2) finite-sum.
double spgr_horizon(const BoundConstants& k, double delta_ub, double eps, bool online);

}  // namespace ncprox
