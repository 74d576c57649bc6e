#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ncprox/error.hpp"
#include "ncprox/estimators.hpp"
#include "ncprox/model.hpp"
#include "ncprox/rng.hpp"
#include "ncprox/types.hpp"

namespace ncprox {

enum class Algorithm { PGD, MBSPG, SPGR, SPGRIMB, HeuristicQSGD };

std::string_view to_string(Algorithm a) noexcept;
Algorithm algorithm_from_string(std::string_view name);

/// Largest round step fraction inside each method's admissible range:
/// PGD 0.9, MBSPG 0.45, SPGR and SPGRIMB 0.3, HeuristicQSGD 0.45.
double default_step_fraction(Algorithm a) noexcept;

struct StepDecay {
  std::size_t halve_every = 100;
  bool operator==(const StepDecay&) const = default;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::PGD;
  Setting setting = Setting::FiniteSum;
  double c = 0.9;                        ///< eta = c / L
  std::optional<std::size_t> T;          ///< horizon; exactly one of T and eps
  std::optional<double> eps;             ///< target accuracy; horizon and batch sizes follow from it
  BatchSchedule schedule = FixedBatch{1};
  std::uint64_t seed = 0;
  std::size_t residual_every = 10;
  std::optional<StepDecay> step_decay;   ///< MBSPG and HeuristicQSGD only
  Sampling sampling = Sampling::WithReplacement;
  std::optional<double> stop_residual;   ///< stop once a measured residual is <= this

  bool operator==(const SolverConfig&) const = default;
};

/// Validates `config` against the objective and replaces eps by a concrete
/// horizon and schedule: PGD uses the deterministic horizon; MBSPG a fixed
/// batch m = ceil(2 c1 sigma^2 / eps^2) and T = 2 c2 Delta / (eta eps^2);
/// SPGR online |S1| = (gamma + 4 theta L) sigma^2 / (theta L eps^2) with
/// q = |S2| = round(sqrt(|S1|)); SPGR finite-sum q = |S2| = ceil(sqrt(n));
/// SPGRIMB the smallest T whose bound is <= eps^2. Delta is F(x0).
SolverConfig resolve_config(const Objective& obj, const SolverConfig& config);

struct TraceRecord {
  std::size_t t = 0;
  std::uint64_t grad_evals = 0;
  double F = 0.0;
  std::optional<double> exact_residual;
  std::size_t nnz = 0;
  std::size_t batch = 0;  ///< samples drawn at the step producing this iterate
  bool anchor = false;

  bool operator==(const TraceRecord&) const = default;
};

struct RunTrace {
  std::vector<TraceRecord> records;  ///< records[0] is the initial point
  Vector x_R;
  std::size_t R = 0;
  Vector x_best;
  double best_residual = kInfinity;
  Vector x_final;
  double wall_ms = 0.0;
  std::size_t anchor_iters = 0;
  std::size_t inner_iters = 0;
  std::uint64_t residual_evals = 0;  ///< full-gradient evaluations spent on measurement
  std::size_t horizon = 0;           ///< resolved T
  bool diverged = false;
  bool stopped_early = false;
};

/// Raised when an iterate becomes non-finite or F exceeds 1e12; carries the
/// partial trace (with diverged set).
class DivergedError : public Error {
 public:
  DivergedError(const std::string& what, RunTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const RunTrace& trace() const noexcept { return trace_; }

 private:
  RunTrace trace_;
};

struct StepEvent {
  std::size_t t;
  const Vector& x_t;
  const Vector& g_t;
  const Vector& x_next;
  double eta;
  std::optional<double> exact_residual;
};

struct SolverHooks {
  std::function<void(const StepEvent&)> on_step;
  BatchObserver on_batch;
};

/// ||grad f(x_next) - g_t - (x_next - x_t) / eta||, an element of the Frechet
/// subdifferential of F at x_next when x_next is a prox step from x_t with g_t.
double stationarity_residual(const Objective& obj, const Vector& x_t, const Vector& x_next,
                             const Vector& g_t, double eta);

/// Pre-registered output index R, uniform on {1, ..., T}.
std::size_t select_output(std::size_t T, CounterRng& rng);

/// Deterministic proximal gradient descent.
RunTrace run_pgd(const Objective& obj, const SolverConfig& config, const Vector& x0,
                 const SolverHooks& hooks = {});
/// Mini-batch stochastic proximal gradient (fixed or increasing batches).
RunTrace run_mb_spg(const Objective& obj, const SolverConfig& config, const Vector& x0,
                    const SolverHooks& hooks = {});
/// Proximal gradient with the SARAH/SPIDER recursive estimator.
RunTrace run_spgr(const Objective& obj, const SolverConfig& config, const Vector& x0,
                  const SolverHooks& hooks = {});
/// Recursive estimator with stage-wise increasing batches.
RunTrace run_spgr_imb(const Objective& obj, const SolverConfig& config, const Vector& x0,
                      const SolverHooks& hooks = {});
/// Quantized SGD baseline: gradient at the grid projection, plain SGD step.
RunTrace run_heuristic_qsgd(const Objective& obj, std::span<const double> grid,
                            const SolverConfig& config, const Vector& x0,
                            const SolverHooks& hooks = {});

/// Dispatches on config.algorithm. HeuristicQSGD takes its grid from a
/// QuantizationPenalty regularizer.
RunTrace run_solver(const Objective& obj, const SolverConfig& config, const Vector& x0,
                    const SolverHooks& hooks = {});

}  // namespace ncprox
