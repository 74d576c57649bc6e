#include "ncprox/harness/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

#include "ncprox/error.hpp"
#include "ncprox/model.hpp"
#include "ncprox/regularizer.hpp"
#include "ncprox/rng.hpp"

namespace ncprox::harness {

bool SuiteReport::passed() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.passed(); });
}

void SuiteReport::print(std::ostream& out) const {
  char line[256];
  std::snprintf(line, sizeof(line), "%-16s %7s %8s %14s  %s\n", "suite", "cases", "failed", "max_violation", "status");
  out << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-16s %7zu %8zu %14.3e  %s", r.name.c_str(), r.cases, r.failures,
                  r.max_violation, r.passed() ? "PASS" : "FAIL");
    out << line;
    if (!r.note.empty()) out << "  (" << r.note << ')';
    out << '\n';
  }
  out << (passed() ? "all suites passed" : "FAILED") << '\n';
}

namespace {

constexpr double kValueSlack = 1e-8;

double log_uniform(CounterRng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * rng.uniform01());
}

// Prox under test; the l0 threshold can be mutated.
double prox_under_test(const Regularizer& r, double x, double eta, double l0_scale) {
  if (r.kind() == RegKind::L0) return hard_threshold(x, l0_scale * 2.0 * eta * r.lambda());
  return prox_scalar(r, x, eta);
}

SuiteRow separable_suite(RegKind kind, const ProxSuiteOptions& opt) {
  SuiteRow row{std::string(to_string(kind)), opt.cases, 0, 0.0, {}};
  CounterRng rng(opt.seed, static_cast<std::uint64_t>(kind) + 1);
  const std::vector<double> grid{-1.0, -0.25, 0.0, 0.5, 2.0};
  for (std::size_t c = 0; c < opt.cases; ++c) {
    const double x = -10.0 + 20.0 * rng.uniform01();
    const double eta = log_uniform(rng, 1e-3, 10.0);
    const double lambda = log_uniform(rng, 1e-4, 10.0);
    Regularizer r = Regularizer::l0(lambda);
    switch (kind) {
      case RegKind::L0: break;
      case RegKind::LHalf: r = Regularizer::l_half(lambda); break;
      case RegKind::LTwoThirds: r = Regularizer::l_two_thirds(lambda); break;
      case RegKind::QuantizationPenalty: r = Regularizer::quantization(lambda, grid); break;
      case RegKind::L1Baseline: r = Regularizer::l1(lambda); break;
      case RegKind::L0BallIndicator: throw ContractViolation("not separable");
    }
    auto r_scalar = [&](double y) { return r.scalar_value(y); };
    const double y = prox_under_test(r, x, eta, opt.l0_threshold_scale);
    // Odd grid size keeps 0 on the grid; minimisers lie within [-|x|, |x|] or
    // between x and a grid point, so [-12, 12] covers them.
    const double o = prox_oracle_1d(x, eta, r_scalar, -12.0, 12.0, 24001);
    const double got = prox_objective_1d(y, x, eta, r_scalar(y));
    const double best = prox_objective_1d(o, x, eta, r_scalar(o));
    const double violation = got - best;
    if (violation > kValueSlack) {
      ++row.failures;
      row.max_violation = std::max(row.max_violation, violation);
    }
  }
  return row;
}

// Exhaustive search over supports of size <= k for small d.
SuiteRow ball_suite(const ProxSuiteOptions& opt) {
  SuiteRow row{"l0_ball", opt.cases, 0, 0.0, "exhaustive supports"};
  CounterRng rng(opt.seed, 99);
  for (std::size_t c = 0; c < opt.cases; ++c) {
    const auto d = static_cast<Eigen::Index>(1 + rng.uniform_index(6));
    Vector x(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      // Coarse values make magnitude ties common.
      x[j] = rng.uniform01() < 0.3 ? static_cast<double>(rng.uniform_index(5)) - 2.0 : -10.0 + 20.0 * rng.uniform01();
    }
    const std::size_t k = 1 + rng.uniform_index(static_cast<std::uint64_t>(d));
    const double eta = log_uniform(rng, 1e-3, 10.0);
    const Vector y = prox_apply(Regularizer::l0_ball(k), x, eta);
    const double got = count_nonzeros(y) <= k ? (y - x).squaredNorm() / (2.0 * eta) : kInfinity;
    double best = kInfinity;
    for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
      double v = 0.0;
      for (Eigen::Index j = 0; j < d; ++j)
        if (!(mask >> j & 1u)) v += x[j] * x[j];
      best = std::min(best, v / (2.0 * eta));
    }
    const double violation = got - best;
    if (!(violation <= kValueSlack)) {
      ++row.failures;
      row.max_violation = std::max(row.max_violation, violation);
    }
  }
  return row;
}

SuiteRow zero_dimension_guard() {
  SuiteRow row{"zero_dimension", 1, 0, 0.0, {}};
  try {
    prox_apply(Regularizer::l0(1.0), Vector(0), 1.0);
    row.failures = 1;
    row.note = "empty input was accepted";
  } catch (const InvalidInput&) {
    row.note = "rejected input: empty vector";
  }
  return row;
}

}  // namespace

SuiteReport run_prox_suite(const ProxSuiteOptions& opt) {
  SuiteReport rep;
  for (RegKind k : {RegKind::L0, RegKind::LHalf, RegKind::LTwoThirds, RegKind::QuantizationPenalty,
                    RegKind::L1Baseline}) {
    rep.rows.push_back(separable_suite(k, opt));
  }
  rep.rows.push_back(ball_suite(opt));
  rep.rows.push_back(zero_dimension_guard());
  if (opt.l0_threshold_scale != 1.0) {
    rep.rows.front().note = "l0 threshold scaled by " + std::to_string(opt.l0_threshold_scale);
  }
  return rep;
}

SuiteReport run_grad_suite(const GradSuiteOptions& opt) {
  SuiteReport rep;
  for (LossKind kind : {LossKind::NllsSigmoid, LossKind::TruncatedLS, LossKind::LeastSquares}) {
    SuiteRow row{std::string(to_string(kind)), opt.cases, 0, 0.0, {}};
    CounterRng rng(opt.seed, static_cast<std::uint64_t>(kind) + 1);
    for (std::size_t c = 0; c < opt.cases; ++c) {
      const std::size_t n = 1 + rng.uniform_index(10);
      const std::size_t d = 1 + rng.uniform_index(8);
      std::vector<std::vector<Dataset::Entry>> rows(n);
      std::vector<double> labels(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t j = 0; j < d; ++j)
          if (rng.uniform01() < 0.7) rows[i].emplace_back(j, rng.normal());
        if (rows[i].empty()) rows[i].emplace_back(static_cast<std::uint32_t>(rng.uniform_index(d)), rng.normal());
        labels[i] = kind == LossKind::NllsSigmoid ? static_cast<double>(rng.uniform_index(2)) : 2.0 * rng.normal();
      }
      SmoothLoss loss{kind, 1.0};
      if (kind == LossKind::TruncatedLS) loss = SmoothLoss::truncated_ls(log_uniform(rng, 0.1, 30.0));
      auto data = std::make_shared<const Dataset>(d, rows, labels);
      const Objective obj(loss, Regularizer::l0(0.0), data, estimate_smoothness(loss, *data));
      Vector x(static_cast<Eigen::Index>(d));
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = 1.5 * rng.normal();
      const Vector g = full_gradient(obj, x);
      const Vector fd = finite_diff_grad(obj, x, 1e-6);
      const double err = (g - fd).norm() / std::max(1.0, g.norm());
      if (!(err < opt.tolerance)) {
        ++row.failures;
        row.max_violation = std::max(row.max_violation, err);
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ncprox::harness
