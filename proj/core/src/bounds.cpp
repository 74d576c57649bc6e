#include "ncprox/bounds.hpp"

#include <cmath>
#include <string>

#include "ncprox/error.hpp"

namespace ncprox {

BoundConstants BoundConstants::from(double c, double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidParameter("L must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("step fraction c must be positive");
  BoundConstants k;
  k.L = L;
  k.c = c;
  k.eta = c / L;
  const double cc = c * (1.0 - 2.0 * c);
  k.c1 = (2.0 * cc + 2.0) / cc;
  k.c2 = (6.0 - 4.0 * c) / (1.0 - 2.0 * c);
  k.gamma = 4.0 * L * L + 1.0 / (k.eta * k.eta) + 2.0 * L / k.eta;
  k.theta = (1.0 - 3.0 * k.eta * L) / (2.0 * k.eta);
  k.pgd_factor = 4.0 * (k.eta * k.eta * L * L + 1.0) / (k.eta * (1.0 - k.eta * L));
  return k;
}

std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::Thm1: return "Thm1";
    case BoundKind::Thm2: return "Thm2";
    case BoundKind::Thm3Online: return "Thm3Online";
    case BoundKind::Thm3FiniteSum: return "Thm3FiniteSum";
    case BoundKind::Thm4Online: return "Thm4Online";
    case BoundKind::Thm4FiniteSum: return "Thm4FiniteSum";
  }
  return "unknown";
}

namespace {

void require_c_range(const BoundConstants& k, double upper, const char* name) {
  if (!(k.c > 0.0 && k.c < upper)) {
    throw InvalidParameter(std::string(name) + " requires step fraction c in (0, " +
                           (upper == 1.0 ? "1" : upper == 0.5 ? "1/2" : "1/3") + "), got c = " +
                           std::to_string(k.c));
  }
}

void require_theta(const BoundConstants& k, const char* name) {
  if (!(k.theta > 0.0)) {
    throw InvalidParameter(std::string(name) +
                           ": theta = (1 - 3 eta L) / (2 eta) <= 0; c must lie in (0, 1/3)");
  }
  require_c_range(k, 1.0 / 3.0, name);
}

double positive(std::optional<double> v, const char* what) {
  if (!v || !(*v > 0.0)) throw InvalidParameter(std::string(what) + " must be given and positive");
  return *v;
}

// (2 theta Delta + gamma eta Delta) / (eta theta T)
double recursive_opt_term(const BoundConstants& k, const BoundInputs& in) {
  return (2.0 * k.theta + k.gamma * k.eta) * in.delta_ub / (k.eta * k.theta * in.T);
}

}  // namespace

double theoretical_bound(BoundKind which, const BoundConstants& k, const BoundInputs& in) {
  if (!(in.T > 0.0)) throw InvalidParameter("bound requires T > 0");
  if (!(in.delta_ub >= 0.0)) throw InvalidParameter("bound requires Delta_ub >= 0");
  if (!(in.sigma2 >= 0.0)) throw InvalidParameter("bound requires sigma2 >= 0");

  switch (which) {
    case BoundKind::Thm1:
      require_c_range(k, 1.0, "Thm1");
      return k.pgd_factor * in.delta_ub / in.T;

    case BoundKind::Thm2: {
      require_c_range(k, 0.5, "Thm2");
      const double opt = k.c2 * in.delta_ub / (k.eta * in.T);
      if (in.s1_size.has_value() == in.b.has_value()) {
        throw InvalidParameter("Thm2 needs exactly one of a fixed batch size or an increasing base b");
      }
      if (in.s1_size) return k.c1 * in.sigma2 / positive(in.s1_size, "batch size") + opt;
      const double b = positive(in.b, "b");
      return k.c1 * in.sigma2 * (std::log(in.T) + 1.0) / (b * in.T) + opt;
    }

    case BoundKind::Thm3Online: {
      require_theta(k, "Thm3Online");
      const double s1 = positive(in.s1_size, "|S1|");
      return recursive_opt_term(k, in) +
             (k.gamma + 4.0 * k.theta * k.L) * in.sigma2 / (2.0 * k.theta * k.L * s1);
    }

    case BoundKind::Thm3FiniteSum:
      require_theta(k, "Thm3FiniteSum");
      return recursive_opt_term(k, in);

    case BoundKind::Thm4Online: {
      require_theta(k, "Thm4Online");
      const double b = positive(in.b, "b");
      return recursive_opt_term(k, in) + (4.0 * k.theta * k.L + k.gamma) * in.sigma2 *
                                             (0.5 * std::log(2.0 * in.T / b) + 1.0) /
                                             (2.0 * b * k.theta * k.L * in.T);
    }

    case BoundKind::Thm4FiniteSum:
      require_theta(k, "Thm4FiniteSum");
      return recursive_opt_term(k, in);
  }
  throw InvalidParameter("unknown bound kind");
}

double pgd_horizon(const BoundConstants& k, double delta_ub, double eps) {
  require_c_range(k, 1.0, "PGD horizon");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  return k.pgd_factor * delta_ub / (eps * eps);
}

double mbspg_horizon(const BoundConstants& k, double delta_ub, double eps) {
  require_c_range(k, 0.5, "MB-SPG horizon");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  return 2.0 * k.c2 * delta_ub / (k.eta * eps * eps);
}

double spgr_online_anchor_size(const BoundConstants& k, double sigma2, double eps) {
  require_theta(k, "SPGR anchor size");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  return (k.gamma + 4.0 * k.theta * k.L) * sigma2 / (k.theta * k.L * eps * eps);
}

double spgr_horizon(const BoundConstants& k, double delta_ub, double eps, bool online) {
  require_theta(k, "SPGR horizon");
  if (!(eps > 0.0)) throw InvalidParameter("eps must be positive");
  const double base = (2.0 * k.theta + k.gamma * k.eta) * delta_ub / (k.eta * k.theta * eps * eps);
  return online ? 2.0 * base : base;
}

}  // namespace ncprox
