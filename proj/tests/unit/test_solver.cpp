#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ncprox/bounds.hpp"
#include "ncprox/error.hpp"
#include "ncprox/solver.hpp"
#include "ncprox/synth.hpp"
#include "test_support.hpp"

namespace {

using namespace ncprox;
using ncprox::tsupport::dense_dataset;
using ncprox::tsupport::share;

// f(x) = (1/2) x^2 from a single least-squares sample with a = 1, y = 0.
Objective half_square() {
  return Objective(SmoothLoss::least_squares(), Regularizer::l0(0.0), share(dense_dataset({{1.0}}, {0.0})), 1.0);
}

Objective nlls_instance(std::size_t n, std::size_t d, Regularizer reg, std::uint64_t seed = 3) {
  auto data = share(synth_classification({.n = n, .d = d, .row_nnz = 5, .seed = seed}));
  CounterRng rng(seed);
  return make_objective(SmoothLoss::nlls(), std::move(reg), data, Vector::Zero(static_cast<Eigen::Index>(d)),
                        std::nullopt, rng);
}

SolverConfig pgd_cfg(double c, std::size_t T) {
  SolverConfig cfg;
  cfg.algorithm = Algorithm::PGD;
  cfg.c = c;
  cfg.T = T;
  cfg.residual_every = 1;
  return cfg;
}

std::vector<double> column_F(const RunTrace& tr) {
  std::vector<double> out;
  for (const auto& r : tr.records) out.push_back(r.F);
  return out;
}

TEST(StationarityResidual, ScriptedQuadratic) {
  const auto obj = half_square();
  Vector x_t(1), x_next(1), g(1);
  x_t << 1.0;
  x_next << 0.5;
  g << 1.0;
  EXPECT_DOUBLE_EQ(stationarity_residual(obj, x_t, x_next, g, 0.5), std::abs(0.5 - 1.0 - (1 / 0.5) * (-0.5)));
  EXPECT_DOUBLE_EQ(stationarity_residual(obj, x_t, x_next, g, 0.5), 0.5);
}

TEST(StationarityResidual, FixedPointIsZero) {
  const auto obj = nlls_instance(20, 6, Regularizer::l0(1e-4));
  CounterRng rng(1);
  const Vector x = tsupport::random_vector(6, rng);
  EXPECT_EQ(stationarity_residual(obj, x, x, full_gradient(obj, x), 0.3), 0.0);
}

TEST(StationarityResidual, PgdCaseCappedByLipschitz) {
  const auto obj = nlls_instance(20, 6, Regularizer::l0(1e-4));
  CounterRng rng(2);
  for (int k = 0; k < 50; ++k) {
    const Vector x = tsupport::random_vector(6, rng);
    const Vector y = x + tsupport::random_vector(6, rng, 0.5);
    const double eta = 0.9 / obj.L();
    EXPECT_LE(stationarity_residual(obj, x, y, full_gradient(obj, x), eta),
              (obj.L() + 1 / eta) * (y - x).norm() * (1 + 1e-12));
  }
}

TEST(Pgd, GeometricDecayOnQuadratic) {
  const auto obj = half_square();
  Vector x0(1);
  x0 << 1.0;
  std::vector<double> xs;
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent& e) { xs.push_back(e.x_next[0]); };
  const auto tr = run_pgd(obj, pgd_cfg(0.5, 5), x0, hooks);
  ASSERT_EQ(xs.size(), 5u);
  for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_EQ(xs[k], std::ldexp(1.0, -static_cast<int>(k + 1)));
  EXPECT_EQ(tr.records.size(), 6u);
  EXPECT_EQ(tr.records[1].exact_residual.value(), 0.5);
}

TEST(Pgd, FixedPointStaysPut) {
  const auto obj = half_square();
  const auto tr = run_pgd(obj, pgd_cfg(0.5, 10), Vector::Zero(1));
  EXPECT_EQ(tr.x_final, Vector::Zero(1));
  for (std::size_t i = 1; i < tr.records.size(); ++i) EXPECT_EQ(tr.records[i].exact_residual.value(), 0.0);
}

TEST(Pgd, SufficientDecreaseEveryStep) {
  const auto obj = nlls_instance(80, 20, Regularizer::l0(1e-4));
  const double eta = 0.9 / obj.L();
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent& e) {
    const double drop = full_objective(obj, e.x_t) - full_objective(obj, e.x_next);
    EXPECT_GE(drop + 1e-9, 0.5 * (1 / eta - obj.L()) * (e.x_next - e.x_t).squaredNorm());
  };
  const auto tr = run_pgd(obj, pgd_cfg(0.9, 200), Vector::Zero(20), hooks);
  for (std::size_t i = 1; i < tr.records.size(); ++i) EXPECT_LE(tr.records[i].F, tr.records[i - 1].F);
}

TEST(Pgd, DeterministicBoundHolds) {
  const auto obj = nlls_instance(80, 20, Regularizer::l0(1e-4));
  const std::size_t T = 150;
  const auto tr = run_pgd(obj, pgd_cfg(0.9, T), Vector::Zero(20));
  double sum = 0.0;
  for (std::size_t i = 1; i < tr.records.size(); ++i) sum += std::pow(*tr.records[i].exact_residual, 2);
  BoundInputs in;
  in.T = T;
  in.delta_ub = obj.f_x0();
  EXPECT_LE(sum / T, theoretical_bound(BoundKind::Thm1, BoundConstants::from(0.9, obj.L()), in) + 1e-9);
}

TEST(Pgd, GradEvalsCountFullPasses) {
  const auto obj = nlls_instance(30, 10, Regularizer::l0(1e-4));
  const auto tr = run_pgd(obj, pgd_cfg(0.5, 7), Vector::Zero(10));
  for (const auto& r : tr.records) EXPECT_EQ(r.grad_evals, r.t * 30);
  EXPECT_EQ(tr.residual_evals, 7u * 30u);
}

TEST(MbSpg, FullBatchWithoutReplacementMatchesPgd) {
  const auto obj = nlls_instance(40, 10, Regularizer::l0(1e-3));
  auto pgd = pgd_cfg(0.45, 30);
  SolverConfig mb = pgd;
  mb.algorithm = Algorithm::MBSPG;
  mb.schedule = FixedBatch{40};
  mb.sampling = Sampling::WithoutReplacement;
  const auto a = run_pgd(obj, pgd, Vector::Zero(10));
  const auto b = run_mb_spg(obj, mb, Vector::Zero(10));
  EXPECT_EQ(a.x_final, b.x_final);
  EXPECT_EQ(column_F(a), column_F(b));
}

TEST(MbSpg, IncreasingBatchSizesLogged) {
  const auto obj = nlls_instance(40, 10, Regularizer::l0(1e-3));
  SolverConfig cfg = pgd_cfg(0.45, 6);
  cfg.algorithm = Algorithm::MBSPG;
  cfg.schedule = IncreasingBatch{1};
  std::vector<std::size_t> sizes;
  SolverHooks hooks;
  hooks.on_batch = [&](std::span<const std::size_t> idx) { sizes.push_back(idx.size()); };
  const auto tr = run_mb_spg(obj, cfg, Vector::Zero(10), hooks);
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 2, 3, 4, 5, 6}));
  for (std::size_t t = 1; t <= 6; ++t) {
    EXPECT_EQ(tr.records[t].batch, t);
    EXPECT_EQ(tr.records[t].grad_evals, t * (t + 1) / 2);
  }
}

TEST(MbSpg, NoiselessSamplesMatchPgd) {
  // Eight identical samples; batch sizes are powers of two so averaging is exact.
  std::vector<std::vector<double>> rows(8, {0.5, -1.0, 2.0});
  const Objective obj(SmoothLoss::nlls(), Regularizer::l0(1e-3), share(dense_dataset(rows, std::vector<double>(8, 1.0))), 0.155 * 5.25);
  for (std::size_t m : {1u, 2u, 4u}) {
    SolverConfig mb = pgd_cfg(0.45, 25);
    mb.algorithm = Algorithm::MBSPG;
    mb.schedule = FixedBatch{m};
    mb.seed = m;
    const auto a = run_pgd(obj, pgd_cfg(0.45, 25), Vector::Zero(3));
    const auto b = run_mb_spg(obj, mb, Vector::Zero(3));
    EXPECT_EQ(a.x_final, b.x_final) << "m=" << m;
  }
}

TEST(Spgr, SingleStepEpochsMatchPgd) {
  const auto obj = nlls_instance(40, 10, Regularizer::l0(1e-3));
  SolverConfig cfg = pgd_cfg(0.3, 20);
  cfg.algorithm = Algorithm::SPGR;
  cfg.setting = Setting::FiniteSum;
  cfg.schedule = SpgrFiniteSum{1};
  const auto a = run_pgd(obj, pgd_cfg(0.3, 20), Vector::Zero(10));
  const auto b = run_spgr(obj, cfg, Vector::Zero(10));
  EXPECT_EQ(a.x_final, b.x_final);
  EXPECT_EQ(b.anchor_iters, 20u);
  EXPECT_EQ(b.inner_iters, 0u);
}

TEST(Spgr, FourSampleFiniteSumEpochs) {
  const auto data = share(dense_dataset({{1, 0}, {0, 1}, {1, 1}, {-1, 2}}, {1, 0, 1, 0}));
  CounterRng rng(4);
  const auto obj = make_objective(SmoothLoss::nlls(), Regularizer::l0(1e-4), data, Vector::Zero(2), std::nullopt, rng);
  SolverConfig cfg = pgd_cfg(0.3, 6);
  cfg.algorithm = Algorithm::SPGR;
  cfg.schedule = make_spgr_finite_sum(4);
  EXPECT_EQ(std::get<SpgrFiniteSum>(cfg.schedule).q, 2u);
  const auto tr = run_spgr(obj, cfg, Vector::Zero(2));
  for (std::size_t t = 1; t <= 6; ++t) {
    EXPECT_EQ(tr.records[t].anchor, (t - 1) % 2 == 0);
    EXPECT_EQ(tr.records[t].batch, tr.records[t].anchor ? 4u : 2u);
  }
  EXPECT_EQ(tr.records.back().grad_evals, 3u * 4u + 3u * 4u);
}

TEST(SpgrImb, StageSizesForUnitBase) {
  const auto obj = nlls_instance(40, 10, Regularizer::l0(1e-3));
  SolverConfig cfg = pgd_cfg(0.3, 2 + 3 + 4);
  cfg.algorithm = Algorithm::SPGRIMB;
  cfg.setting = Setting::Online;
  cfg.schedule = SpgrImb{1};
  std::vector<std::size_t> sizes;
  SolverHooks hooks;
  hooks.on_batch = [&](std::span<const std::size_t> idx) { sizes.push_back(idx.size()); };
  const auto tr = run_spgr_imb(obj, cfg, Vector::Zero(10), hooks);
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 1, 4, 2, 2, 9, 3, 3, 3}));
  EXPECT_EQ(tr.anchor_iters, 3u);
  EXPECT_EQ(tr.inner_iters, 6u);
}

TEST(SpgrImb, SingleStage) {
  const auto obj = nlls_instance(40, 10, Regularizer::l0(1e-3));
  SolverConfig cfg = pgd_cfg(0.3, 4);
  cfg.algorithm = Algorithm::SPGRIMB;
  cfg.setting = Setting::Online;
  cfg.schedule = SpgrImb{3};
  const auto tr = run_spgr_imb(obj, cfg, Vector::Zero(10));
  EXPECT_EQ(tr.anchor_iters, 1u);
  EXPECT_EQ(tr.inner_iters, 3u);
  EXPECT_EQ(tr.records.back().grad_evals, 9u + 3u * 2u * 3u);
}

TEST(HeuristicQsgd, ProjectsBeforeGradient) {
  const std::vector<double> grid{-1.0, 1.0};
  EXPECT_EQ(nearest_grid_point(grid, 0.3), 1.0);
  // Single sample a = (1), y = 0 least squares: gradient at x_hat = 1 is 1.
  const Objective obj(SmoothLoss::least_squares(), Regularizer::quantization(1.0, grid),
                      share(dense_dataset({{1.0}}, {0.0})), 1.0);
  SolverConfig cfg = pgd_cfg(0.5, 1);
  cfg.algorithm = Algorithm::HeuristicQSGD;
  cfg.schedule = FixedBatch{1};
  Vector x0(1);
  x0 << 0.3;
  const auto tr = run_solver(obj, cfg, x0);
  EXPECT_DOUBLE_EQ(tr.x_final[0], 0.3 - 0.5 * 1.0);
  EXPECT_FALSE(tr.records[1].exact_residual.has_value());
}

TEST(HeuristicQsgd, StationaryOnGridAtZeroGradient) {
  const std::vector<double> grid{-1.0, 1.0};
  const Objective obj(SmoothLoss::nlls(), Regularizer::quantization(1.0, grid),
                      share(dense_dataset({{1, 1}, {2, 2}}, {0.5, 0.5})), 1.0);
  SolverConfig cfg = pgd_cfg(0.45, 20);
  cfg.algorithm = Algorithm::HeuristicQSGD;
  cfg.schedule = FixedBatch{1};
  Vector x0(2);
  x0 << 1.0, -1.0;
  EXPECT_EQ(run_solver(obj, cfg, x0).x_final, x0);
}

TEST(HeuristicQsgd, StepDecayHalves) {
  const Objective obj(SmoothLoss::least_squares(), Regularizer::quantization(1.0, {-1.0, 1.0}),
                      share(dense_dataset({{1.0}}, {0.0})), 1.0);
  SolverConfig cfg = pgd_cfg(0.5, 4);
  cfg.algorithm = Algorithm::HeuristicQSGD;
  cfg.schedule = FixedBatch{1};
  cfg.step_decay = StepDecay{2};
  std::vector<double> etas;
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent& e) { etas.push_back(e.eta); };
  run_solver(obj, cfg, Vector::Zero(1), hooks);
  EXPECT_EQ(etas, (std::vector<double>{0.5, 0.5, 0.25, 0.25}));
}

TEST(Divergence, ReportsPartialTrace) {
  const Objective obj(SmoothLoss::least_squares(), Regularizer::quantization(1.0, {-1.0, 1.0}),
                      share(dense_dataset({{1.0}}, {1e3})), 1.0);
  SolverConfig cfg = pgd_cfg(50.0, 100);
  cfg.algorithm = Algorithm::HeuristicQSGD;
  cfg.schedule = FixedBatch{1};
  Vector x0(1);
  x0 << 5.0;
  try {
    run_solver(obj, cfg, x0);
    FAIL() << "expected divergence";
  } catch (const DivergedError& e) {
    EXPECT_TRUE(e.trace().diverged);
    EXPECT_GT(e.trace().records.size(), 1u);
    EXPECT_LT(e.trace().records.size(), 101u);
  }
}

TEST(ResolveConfig, Validation) {
  const auto obj = nlls_instance(30, 10, Regularizer::l0(1e-4));
  SolverConfig cfg = pgd_cfg(1.0, 10);
  EXPECT_THROW(resolve_config(obj, cfg), InvalidParameter);
  cfg.c = 0.5;
  cfg.eps = 0.1;
  EXPECT_THROW(resolve_config(obj, cfg), InvalidParameter);
  cfg.T.reset();
  cfg.eps.reset();
  EXPECT_THROW(resolve_config(obj, cfg), InvalidParameter);
  SolverConfig mb = pgd_cfg(0.45, 10);
  mb.algorithm = Algorithm::MBSPG;
  mb.c = 0.5;
  EXPECT_THROW(resolve_config(obj, mb), InvalidParameter);
  SolverConfig sp = pgd_cfg(0.34, 10);
  sp.algorithm = Algorithm::SPGR;
  sp.schedule = SpgrFiniteSum{3};
  EXPECT_THROW(resolve_config(obj, sp), InvalidParameter);
  sp.c = 0.3;
  sp.schedule = FixedBatch{3};
  EXPECT_THROW(resolve_config(obj, sp), InvalidParameter);
  sp.schedule = SpgrFiniteSum{3};
  sp.step_decay = StepDecay{10};
  EXPECT_THROW(resolve_config(obj, sp), InvalidParameter);
}

TEST(ResolveConfig, AccuracyDrivenSchedules) {
  const auto obj = nlls_instance(30, 10, Regularizer::l0(1e-4)).with_sigma2(0.02);
  const double eps = 0.2;
  SolverConfig mb;
  mb.algorithm = Algorithm::MBSPG;
  mb.c = 0.45;
  mb.eps = eps;
  const auto r = resolve_config(obj, mb);
  const auto k = BoundConstants::from(0.45, obj.L());
  EXPECT_EQ(std::get<FixedBatch>(r.schedule).m, schedule_fixed_batch(0.45, 0.02, eps));
  EXPECT_EQ(*r.T, static_cast<std::size_t>(std::ceil(mbspg_horizon(k, obj.f_x0(), eps))));
  EXPECT_FALSE(r.eps.has_value());

  SolverConfig sp;
  sp.algorithm = Algorithm::SPGR;
  sp.setting = Setting::FiniteSum;
  sp.c = 0.3;
  sp.eps = eps;
  EXPECT_EQ(std::get<SpgrFiniteSum>(resolve_config(obj, sp).schedule).q, 6u);

  SolverConfig imb;
  imb.algorithm = Algorithm::SPGRIMB;
  imb.setting = Setting::Online;
  imb.c = 0.3;
  imb.eps = eps;
  imb.schedule = SpgrImb{1};
  const auto ri = resolve_config(obj, imb);
  const auto k3 = BoundConstants::from(0.3, obj.L());
  BoundInputs in;
  in.b = 1;
  in.sigma2 = 0.02;
  in.delta_ub = obj.f_x0();
  in.T = static_cast<double>(*ri.T);
  EXPECT_LE(theoretical_bound(BoundKind::Thm4Online, k3, in), eps * eps);
  in.T -= 1;
  if (in.T >= 1) EXPECT_GT(theoretical_bound(BoundKind::Thm4Online, k3, in), eps * eps);
}

TEST(SelectOutput, DegenerateAndDeterministic) {
  CounterRng one(4), a(5), b(5);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(select_output(1, one), 1u);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(select_output(37, a), select_output(37, b));
}

TEST(SelectOutput, UniformChiSquare) {
  CounterRng rng(6);
  std::vector<int> counts(11, 0);
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) {
    const auto R = select_output(10, rng);
    ASSERT_GE(R, 1u);
    ASSERT_LE(R, 10u);
    ++counts[R];
  }
  double chi2 = 0.0;
  for (int r = 1; r <= 10; ++r) chi2 += std::pow(counts[r] - draws / 10.0, 2) / (draws / 10.0);
  EXPECT_LT(chi2, 21.666);  // 0.99 quantile, 9 degrees of freedom
}

TEST(SolverProperty, ResidualUsesTheStepEstimate) {
  const auto obj = nlls_instance(60, 12, Regularizer::l0(1e-3));
  SolverConfig cfg = pgd_cfg(0.3, 40);
  cfg.algorithm = Algorithm::SPGR;
  cfg.setting = Setting::Online;
  cfg.schedule = make_spgr_online(16);
  cfg.residual_every = 3;
  int checked = 0;
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent& e) {
    EXPECT_EQ(e.x_next, prox_apply(obj.reg(), e.x_t - e.eta * e.g_t, e.eta));
    if (e.exact_residual) {
      EXPECT_EQ(*e.exact_residual, stationarity_residual(obj, e.x_t, e.x_next, e.g_t, e.eta));
      ++checked;
    }
  };
  run_spgr(obj, cfg, Vector::Zero(12), hooks);
  EXPECT_EQ(checked, 14);  // t = 3, 6, ..., 39 and the final iteration 40
}

TEST(SolverProperty, IdenticalTracesForIdenticalInputs) {
  const auto obj = nlls_instance(60, 12, Regularizer::l0(1e-3));
  std::vector<SolverConfig> cfgs;
  SolverConfig mb = pgd_cfg(0.45, 30);
  mb.algorithm = Algorithm::MBSPG;
  mb.schedule = FixedBatch{5};
  mb.seed = 11;
  cfgs.push_back(mb);
  SolverConfig sp = pgd_cfg(0.3, 30);
  sp.algorithm = Algorithm::SPGR;
  sp.setting = Setting::Online;
  sp.schedule = make_spgr_online(9);
  sp.seed = 12;
  cfgs.push_back(sp);
  SolverConfig imb = sp;
  imb.algorithm = Algorithm::SPGRIMB;
  imb.schedule = SpgrImb{1};
  cfgs.push_back(imb);
  for (const auto& cfg : cfgs) {
    const auto a = run_solver(obj, cfg, Vector::Zero(12));
    const auto b = run_solver(obj, cfg, Vector::Zero(12));
    EXPECT_EQ(a.records, b.records);
    EXPECT_EQ(a.x_R, b.x_R);
    EXPECT_EQ(a.R, b.R);
  }
}

TEST(SolverProperty, BallConstraintFeasibleThroughout) {
  const auto obj = nlls_instance(60, 15, Regularizer::l0_ball(3));
  for (auto alg : {Algorithm::PGD, Algorithm::MBSPG, Algorithm::SPGR}) {
    SolverConfig cfg = pgd_cfg(default_step_fraction(alg), 40);
    cfg.algorithm = alg;
    if (alg == Algorithm::MBSPG) cfg.schedule = FixedBatch{4};
    if (alg == Algorithm::SPGR) {
      cfg.setting = Setting::Online;
      cfg.schedule = make_spgr_online(16);
    }
    const auto tr = run_solver(obj, cfg, Vector::Zero(15));
    for (const auto& r : tr.records) EXPECT_LE(r.nnz, 3u);
    EXPECT_LE(count_nonzeros(tr.x_R), 3u);
  }
}

TEST(SolverProperty, TraceShape) {
  const auto obj = nlls_instance(60, 12, Regularizer::l0(1e-3));
  SolverConfig cfg = pgd_cfg(0.45, 25);
  cfg.algorithm = Algorithm::MBSPG;
  cfg.schedule = IncreasingBatch{2};
  const auto tr = run_solver(obj, cfg, Vector::Zero(12));
  ASSERT_EQ(tr.records.size(), 26u);
  for (std::size_t i = 1; i < tr.records.size(); ++i) {
    EXPECT_EQ(tr.records[i].t, tr.records[i - 1].t + 1);
    EXPECT_GE(tr.records[i].grad_evals, tr.records[i - 1].grad_evals);
  }
  EXPECT_GE(tr.R, 1u);
  EXPECT_LE(tr.R, 25u);
}

TEST(SolverProperty, EarlyStopClampsOutputIndex) {
  const auto obj = half_square();
  SolverConfig cfg = pgd_cfg(0.5, 1000);
  cfg.stop_residual = 1e-3;
  Vector x0(1);
  x0 << 1.0;
  const auto tr = run_pgd(obj, cfg, x0);
  EXPECT_TRUE(tr.stopped_early);
  EXPECT_LE(tr.R, tr.records.back().t);
  EXPECT_LE(*tr.records.back().exact_residual, 1e-3);
}

}  // namespace
