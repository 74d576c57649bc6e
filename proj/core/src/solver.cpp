#include "ncprox/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "ncprox/bounds.hpp"

namespace ncprox {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::PGD: return "PGD";
    case Algorithm::MBSPG: return "MBSPG";
    case Algorithm::SPGR: return "SPGR";
    case Algorithm::SPGRIMB: return "SPGRIMB";
    case Algorithm::HeuristicQSGD: return "HeuristicQSGD";
  }
  return "unknown";
}

Algorithm algorithm_from_string(std::string_view name) {
  for (Algorithm a : {Algorithm::PGD, Algorithm::MBSPG, Algorithm::SPGR, Algorithm::SPGRIMB,
                      Algorithm::HeuristicQSGD}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidParameter("unknown algorithm '" + std::string(name) + "'");
}

double default_step_fraction(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::PGD: return 0.9;
    case Algorithm::MBSPG: return 0.45;
    case Algorithm::SPGR:
    case Algorithm::SPGRIMB: return 0.3;
    case Algorithm::HeuristicQSGD: return 0.45;
  }
  return 0.3;
}

double stationarity_residual(const Objective& obj, const Vector& x_t, const Vector& x_next,
                             const Vector& g_t, double eta) {
  if (!(eta > 0.0)) throw InvalidParameter("stationarity_residual: eta must be positive");
  const Vector v = full_gradient(obj, x_next) - g_t - (x_next - x_t) / eta;
  return v.norm();
}

std::size_t select_output(std::size_t T, CounterRng& rng) {
  if (T < 1) throw InvalidParameter("select_output: T must be at least 1");
  return 1 + static_cast<std::size_t>(rng.uniform_index(T));
}

namespace {

constexpr double kDivergenceThreshold = 1e12;
constexpr double kMaxHorizon = 1e10;
constexpr std::uint64_t kOutputStream = 0x6f7574;  // independent stream for R

std::size_t to_horizon(double T) {
  if (!std::isfinite(T) || T > kMaxHorizon) {
    throw InvalidParameter("derived horizon " + std::to_string(T) +
                           " is too large; give T explicitly");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T)));
}

void check_c(const SolverConfig& cfg) {
  double upper = 1.0;
  const char* range = "(0, 1)";
  switch (cfg.algorithm) {
    case Algorithm::PGD: break;
    case Algorithm::MBSPG:
      upper = 0.5;
      range = "(0, 1/2)";
      break;
    case Algorithm::SPGR:
    case Algorithm::SPGRIMB:
      upper = 1.0 / 3.0;
      range = "(0, 1/3)";
      break;
    case Algorithm::HeuristicQSGD:
      upper = std::numeric_limits<double>::infinity();
      range = "(0, inf)";
      break;
  }
  if (!(cfg.c > 0.0 && cfg.c < upper)) {
    throw InvalidParameter(std::string(to_string(cfg.algorithm)) + " requires step fraction c in " +
                           range + ", got " + std::to_string(cfg.c));
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_schedule(const SolverConfig& cfg) {
  const auto& s = cfg.schedule;
  auto bad = [&](const char* want) {
    throw InvalidParameter(std::string(to_string(cfg.algorithm)) + " requires a " + want +
                           " batch schedule");
  };
  switch (cfg.algorithm) {
    case Algorithm::PGD: return;
    case Algorithm::MBSPG:
    case Algorithm::HeuristicQSGD:
      if (!std::holds_alternative<FixedBatch>(s) && !std::holds_alternative<IncreasingBatch>(s)) {
        bad("Fixed or Increasing");
      }
      break;
    case Algorithm::SPGR:
      if (cfg.setting == Setting::Online && !std::holds_alternative<SpgrOnline>(s)) bad("SpgrOnline");
      if (cfg.setting == Setting::FiniteSum && !std::holds_alternative<SpgrFiniteSum>(s)) {
        bad("SpgrFiniteSum");
      }
      break;
    case Algorithm::SPGRIMB:
      if (!std::holds_alternative<SpgrImb>(s)) bad("SpgrImb");
      break;
  }
  std::visit(Overloaded{
                 [](const FixedBatch& f) {
                   if (f.m < 1) throw InvalidParameter("fixed batch size must be at least 1");
                 },
                 [](const IncreasingBatch& f) {
                   if (f.b < 1) throw InvalidParameter("increasing batch base must be at least 1");
                 },
                 [](const SpgrOnline& f) {
                   if (f.s1_size < 1 || f.s2_size < 1 || f.q < 1) {
                     throw InvalidParameter("SpgrOnline sizes must be at least 1");
                   }
                   if (f.q != f.s2_size) throw InvalidParameter("SpgrOnline requires q = |S2|");
                 },
                 [](const SpgrFiniteSum& f) {
                   if (f.q < 1) throw InvalidParameter("SpgrFiniteSum q must be at least 1");
                 },
                 [](const SpgrImb& f) {
                   if (f.b < 1) throw InvalidParameter("SpgrImb base b must be at least 1");
                 },
             },
             s);
}

// Smallest T with the staged bound <= eps^2 (found by doubling then bisection).
std::size_t imb_horizon(const BoundConstants& k, const Objective& obj, const SolverConfig& cfg,
                        std::size_t b) {
  const double target = *cfg.eps * *cfg.eps;
  const BoundKind kind =
      cfg.setting == Setting::Online ? BoundKind::Thm4Online : BoundKind::Thm4FiniteSum;
  auto bound = [&](double T) {
    BoundInputs in;
    in.T = T;
    in.b = static_cast<double>(b);
    in.sigma2 = obj.sigma2();
    in.delta_ub = obj.f_x0();
    return theoretical_bound(kind, k, in);
  };
  double hi = 1.0;
  while (bound(hi) > target) {
    hi *= 2.0;
    if (hi > kMaxHorizon) return to_horizon(hi);
  }
  double lo = hi / 2.0;
  if (bound(lo) <= target) return to_horizon(lo);
  while (hi - lo > 1.0) {
    const double mid = std::floor(0.5 * (lo + hi));
    (bound(mid) <= target ? hi : lo) = mid;
  }
  return to_horizon(hi);
}

}  // namespace

SolverConfig resolve_config(const Objective& obj, const SolverConfig& config) {
  SolverConfig cfg = config;
  check_c(cfg);
  if (cfg.T.has_value() == cfg.eps.has_value()) {
    throw InvalidParameter("exactly one of T and eps must be given");
  }
  if (cfg.T && *cfg.T < 1) throw InvalidParameter("horizon T must be at least 1");
  if (cfg.eps && !(*cfg.eps > 0.0)) throw InvalidParameter("target accuracy eps must be positive");
  if (cfg.residual_every < 1) throw InvalidParameter("residual_every must be at least 1");
  if (cfg.step_decay) {
    if (cfg.step_decay->halve_every < 1) {
      throw InvalidParameter("step_decay.halve_every must be at least 1");
    }
    if (cfg.algorithm != Algorithm::MBSPG && cfg.algorithm != Algorithm::HeuristicQSGD) {
      throw InvalidParameter("step_decay applies only to MBSPG and HeuristicQSGD");
    }
  }

  if (cfg.eps) {
    const BoundConstants k = BoundConstants::from(cfg.c, obj.L());
    const double eps = *cfg.eps;
    const double delta = obj.f_x0();
    switch (cfg.algorithm) {
      case Algorithm::PGD: cfg.T = to_horizon(pgd_horizon(k, delta, eps)); break;
      case Algorithm::MBSPG:
        if (!std::holds_alternative<IncreasingBatch>(cfg.schedule)) {
          cfg.schedule = FixedBatch{schedule_fixed_batch(cfg.c, obj.sigma2(), eps)};
        }
        cfg.T = to_horizon(mbspg_horizon(k, delta, eps));
        break;
      case Algorithm::SPGR:
        if (cfg.setting == Setting::Online) {
          cfg.schedule = make_spgr_online(
              to_horizon(spgr_online_anchor_size(k, obj.sigma2(), eps)));
          cfg.T = to_horizon(spgr_horizon(k, delta, eps, true));
        } else {
          cfg.schedule = make_spgr_finite_sum(obj.n());
          cfg.T = to_horizon(spgr_horizon(k, delta, eps, false));
        }
        break;
      case Algorithm::SPGRIMB: {
        const auto* imb = std::get_if<SpgrImb>(&cfg.schedule);
        const std::size_t b = imb ? imb->b : 1;
        cfg.schedule = SpgrImb{b};
        cfg.T = imb_horizon(k, obj, cfg, b);
        break;
      }
      case Algorithm::HeuristicQSGD:
        throw InvalidParameter("HeuristicQSGD has no accuracy-driven horizon; give T");
    }
    cfg.eps.reset();
  }
  check_schedule(cfg);
  if (cfg.sampling == Sampling::WithoutReplacement) {
    std::visit(Overloaded{
                   [&](const FixedBatch& f) {
                     if (f.m > obj.n()) {
                       throw InvalidParameter("batch without replacement larger than n");
                     }
                   },
                   [](const auto&) {},
               },
               cfg.schedule);
  }
  return cfg;
}

namespace {

struct StepOutcome {
  Vector g;
  std::size_t batch = 0;
  bool anchor = false;
};

// Shared iteration driver: estimate g_t, step, log, check divergence, keep x_R.
class Driver {
 public:
  Driver(const Objective& obj, const SolverConfig& cfg, const Vector& x0, const SolverHooks& hooks)
      : obj_(obj), cfg_(resolve_config(obj, cfg)), hooks_(hooks), rng_(cfg_.seed),
        eta_(cfg_.c / obj.L()), x_(x0) {
    if (static_cast<std::size_t>(x0.size()) != obj.d()) {
      throw InvalidInput("initial point has the wrong dimension");
    }
    if (!x0.allFinite()) throw InvalidInput("initial point must be finite");
    CounterRng out_rng(cfg_.seed, kOutputStream);
    trace_.horizon = *cfg_.T;
    trace_.R = select_output(*cfg_.T, out_rng);
    trace_.x_final = x0;
    trace_.x_best = x0;
    trace_.x_R = x0;
    TraceRecord r0;
    r0.t = 0;
    r0.F = full_objective(obj, x0);
    r0.nnz = count_nonzeros(x0);
    trace_.records.push_back(r0);
  }

  const SolverConfig& config() const noexcept { return cfg_; }
  CounterRng& rng() noexcept { return rng_; }
  double eta() const noexcept { return eta_; }
  std::uint64_t& grad_evals() noexcept { return evals_; }

  double step_size(std::size_t t) const {
    if (!cfg_.step_decay) return eta_;
    return eta_ * std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(
                                       t / cfg_.step_decay->halve_every, 1000)));
  }

  /// estimate(t, x) -> StepOutcome; update(t, x, g, eta) -> x_next.
  template <class Estimate, class Update>
  RunTrace run(Estimate&& estimate, Update&& update, bool measure_residual = true) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t T = *cfg_.T;
    for (std::size_t t = 0; t < T; ++t) {
      StepOutcome step = estimate(t, static_cast<const Vector&>(x_));
      (step.anchor ? trace_.anchor_iters : trace_.inner_iters) += 1;
      const double eta_t = step_size(t);
      Vector x_next = update(t, static_cast<const Vector&>(x_), static_cast<const Vector&>(step.g), eta_t);

      TraceRecord rec;
      rec.t = t + 1;
      rec.grad_evals = evals_;
      rec.batch = step.batch;
      rec.anchor = step.anchor;
      const bool finite = x_next.allFinite();
      rec.F = finite ? full_objective(obj_, x_next) : std::numeric_limits<double>::quiet_NaN();
      rec.nnz = finite ? count_nonzeros(x_next) : 0;
      if (finite && measure_residual && (rec.t % cfg_.residual_every == 0 || rec.t == T)) {
        rec.exact_residual = stationarity_residual(obj_, x_, x_next, step.g, eta_t);
        trace_.residual_evals += obj_.n();
        if (*rec.exact_residual < trace_.best_residual) {
          trace_.best_residual = *rec.exact_residual;
          trace_.x_best = x_next;
        }
      }
      if (hooks_.on_step) hooks_.on_step(StepEvent{t, x_, step.g, x_next, eta_t, rec.exact_residual});
      trace_.records.push_back(rec);

      if (!finite || !std::isfinite(rec.F) || rec.F > kDivergenceThreshold) {
        trace_.diverged = true;
        trace_.wall_ms = elapsed_ms(start);
        throw DivergedError(std::string(to_string(cfg_.algorithm)) + " diverged at iteration " +
                                std::to_string(rec.t),
                            std::move(trace_));
      }
      if (rec.t == trace_.R) trace_.x_R = x_next;
      x_ = std::move(x_next);
      if (cfg_.stop_residual && rec.exact_residual && *rec.exact_residual <= *cfg_.stop_residual) {
        trace_.stopped_early = true;
        if (trace_.R > rec.t) {
          trace_.R = rec.t;
          trace_.x_R = x_;
        }
        break;
      }
    }
    trace_.x_final = x_;
    if (!std::isfinite(trace_.best_residual)) trace_.x_best = x_;
    trace_.wall_ms = elapsed_ms(start);
    return std::move(trace_);
  }

  template <class Estimate>
  RunTrace run_prox(Estimate&& estimate) {
    return run(std::forward<Estimate>(estimate),
               [this](std::size_t, const Vector& x, const Vector& g, double eta) {
                 return prox_apply(obj_.reg(), x - eta * g, eta);
               });
  }

 private:
  static double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  const Objective& obj_;
  SolverConfig cfg_;
  const SolverHooks& hooks_;
  CounterRng rng_;
  double eta_;
  Vector x_;
  std::uint64_t evals_ = 0;
  RunTrace trace_;
};

void require_algorithm(const SolverConfig& cfg, Algorithm a) {
  if (cfg.algorithm != a) {
    throw InvalidParameter("configuration is for " + std::string(to_string(cfg.algorithm)) +
                           ", not " + std::string(to_string(a)));
  }
}

std::size_t minibatch_size(const SolverConfig& cfg, std::size_t t) {
  if (const auto* f = std::get_if<FixedBatch>(&cfg.schedule)) return f->m;
  return schedule_increasing_batch(t, std::get<IncreasingBatch>(cfg.schedule).b);
}

}  // namespace

RunTrace run_pgd(const Objective& obj, const SolverConfig& config, const Vector& x0,
                 const SolverHooks& hooks) {
  require_algorithm(config, Algorithm::PGD);
  Driver drv(obj, config, x0, hooks);
  return drv.run_prox([&](std::size_t, const Vector& x) {
    drv.grad_evals() += obj.n();
    return StepOutcome{full_gradient(obj, x), obj.n(), false};
  });
}

RunTrace run_mb_spg(const Objective& obj, const SolverConfig& config, const Vector& x0,
                    const SolverHooks& hooks) {
  require_algorithm(config, Algorithm::MBSPG);
  Driver drv(obj, config, x0, hooks);
  const SolverConfig& cfg = drv.config();
  return drv.run_prox([&](std::size_t t, const Vector& x) {
    const std::size_t m = minibatch_size(cfg, t);
    BatchGrad bg = minibatch_grad(obj, x, m, drv.rng(), cfg.sampling, hooks.on_batch);
    drv.grad_evals() += bg.evals;
    return StepOutcome{std::move(bg.g), m, false};
  });
}

RunTrace run_spgr(const Objective& obj, const SolverConfig& config, const Vector& x0,
                  const SolverHooks& hooks) {
  require_algorithm(config, Algorithm::SPGR);
  Driver drv(obj, config, x0, hooks);
  const SolverConfig& cfg = drv.config();

  AnchorSpec anchor;
  anchor.setting = cfg.setting;
  anchor.sampling = cfg.sampling;
  std::size_t s2 = 0;
  if (const auto* on = std::get_if<SpgrOnline>(&cfg.schedule)) {
    anchor.s1_size = on->s1_size;
    anchor.q = on->q;
    s2 = on->s2_size;
  } else {
    const auto& fs = std::get<SpgrFiniteSum>(cfg.schedule);
    anchor.s1_size = obj.n();
    anchor.q = fs.q;
    s2 = fs.q;
  }

  EstimatorState state;
  return drv.run_prox([&](std::size_t t, const Vector& x) {
    const std::uint64_t before = state.grad_evals;
    StepOutcome out;
    if (t % anchor.q == 0) {
      out.g = sarah_anchor(obj, x, anchor, drv.rng(), state, hooks.on_batch);
      out.anchor = true;
      out.batch = cfg.setting == Setting::FiniteSum ? obj.n() : anchor.s1_size;
    } else {
      out.g = sarah_step(obj, state, x, s2, drv.rng(), cfg.sampling, hooks.on_batch);
      out.batch = s2;
    }
    drv.grad_evals() += state.grad_evals - before;
    return out;
  });
}

RunTrace run_spgr_imb(const Objective& obj, const SolverConfig& config, const Vector& x0,
                      const SolverHooks& hooks) {
  require_algorithm(config, Algorithm::SPGRIMB);
  Driver drv(obj, config, x0, hooks);
  const SolverConfig& cfg = drv.config();
  const std::size_t b = std::get<SpgrImb>(cfg.schedule).b;

  EstimatorState state;
  std::size_t stage = 0;
  std::size_t next_anchor = 0;
  ImbStage sizes{};
  return drv.run_prox([&](std::size_t t, const Vector& x) {
    const std::uint64_t before = state.grad_evals;
    StepOutcome out;
    if (t == next_anchor) {
      ++stage;
      sizes = spgr_imb_schedule(stage, b);
      AnchorSpec anchor;
      anchor.setting = cfg.setting;
      anchor.s1_size = sizes.s1_size;
      anchor.q = 1 + sizes.inner_len;
      anchor.sampling = cfg.sampling;
      out.g = sarah_anchor(obj, x, anchor, drv.rng(), state, hooks.on_batch);
      out.anchor = true;
      out.batch = cfg.setting == Setting::FiniteSum ? obj.n() : sizes.s1_size;
      next_anchor = t + anchor.q;
    } else {
      out.g = sarah_step(obj, state, x, sizes.s2_size, drv.rng(), cfg.sampling, hooks.on_batch);
      out.batch = sizes.s2_size;
    }
    drv.grad_evals() += state.grad_evals - before;
    return out;
  });
}

RunTrace run_heuristic_qsgd(const Objective& obj, std::span<const double> grid,
                            const SolverConfig& config, const Vector& x0, const SolverHooks& hooks) {
  require_algorithm(config, Algorithm::HeuristicQSGD);
  if (grid.empty()) throw InvalidParameter("quantization grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw InvalidParameter("quantization grid must be strictly increasing");
  }
  Driver drv(obj, config, x0, hooks);
  const SolverConfig& cfg = drv.config();
  return drv.run(
      [&](std::size_t t, const Vector& x) {
        const Vector x_hat = project_to_grid(grid, x);
        const std::size_t m = minibatch_size(cfg, t);
        BatchGrad bg = minibatch_grad(obj, x_hat, m, drv.rng(), cfg.sampling, hooks.on_batch);
        drv.grad_evals() += bg.evals;
        return StepOutcome{std::move(bg.g), m, false};
      },
      [](std::size_t, const Vector& x, const Vector& g, double eta) -> Vector { return x - eta * g; },
      /*measure_residual=*/false);
}

RunTrace run_solver(const Objective& obj, const SolverConfig& config, const Vector& x0,
                    const SolverHooks& hooks) {
  switch (config.algorithm) {
    case Algorithm::PGD: return run_pgd(obj, config, x0, hooks);
    case Algorithm::MBSPG: return run_mb_spg(obj, config, x0, hooks);
    case Algorithm::SPGR: return run_spgr(obj, config, x0, hooks);
    case Algorithm::SPGRIMB: return run_spgr_imb(obj, config, x0, hooks);
    case Algorithm::HeuristicQSGD:
      if (obj.reg().kind() != RegKind::QuantizationPenalty) {
        throw InvalidParameter("HeuristicQSGD needs a quantization regularizer to supply the grid");
      }
      return run_heuristic_qsgd(obj, obj.reg().grid(), config, x0, hooks);
  }
  throw InvalidParameter("unknown algorithm");
}

}  // namespace ncprox
