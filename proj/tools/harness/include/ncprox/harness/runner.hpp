#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncprox/harness/spec.hpp"
#include "ncprox/model.hpp"
#include "ncprox/solver.hpp"

namespace ncprox::harness {

/// Column order of the trace CSV.
inline constexpr const char* kCsvHeader = "run_id,algorithm,seed,t,grad_evals,F,exact_residual,nnz,wall_ms";

/// Residual levels reported in the summary.
inline constexpr double kSummaryThresholds[] = {1e-1, 1e-2, 1e-3};

/// Train objective plus optional held-out set, built once per experiment.
struct Problem {
  std::shared_ptr<const Dataset> train;
  std::shared_ptr<const Dataset> test;   ///< null without test_fraction
  std::optional<Objective> objective;
  Vector x0;
};

/// Loads or generates the dataset, applies binarization, normalization and the
/// split, fills regularizer/loss defaults, and estimates sigma2 when needed.
/// `spec_dir` resolves a relative dataset path.
Problem build_problem(const ExperimentSpec& spec, const std::filesystem::path& spec_dir = {});

/// Solver configuration for one seed, with schedule defaults that depend on n.
SolverConfig make_solver_config(const SolverSpec& s, std::uint64_t seed, const Objective& obj);

enum class RunStatus { Ok, Diverged, Failed };

struct RunOutcome {
  std::size_t run_id = 0;
  std::size_t solver_index = 0;
  std::string label;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Ok;
  std::string message;
  RunTrace trace;
  std::vector<double> wall_ms;               ///< elapsed time at each record
  std::optional<double> test_accuracy;       ///< x_final on the held-out set
  std::optional<double> test_accuracy_grid;  ///< grid-projected x_final (quantization)
};

struct RunOptions {
  std::size_t jobs = 1;
};

/// Runs every (solver, seed) pair; run_id enumerates solvers outer, seeds
/// inner. A failing run is recorded and does not stop the others.
std::vector<RunOutcome> run_all(const ExperimentSpec& spec, const Problem& problem,
                                const RunOptions& options = {});

/// Writes the trace CSV in run_id order.
void write_trace_csv(std::ostream& out, const std::vector<RunOutcome>& runs);

/// Writes the per-run and per-algorithm summary (JSON).
void write_summary(std::ostream& out, const std::vector<RunOutcome>& runs);

/// 0/1 accuracy of the prediction 1{sigmoid(x.a) > 1/2} against {0,1} labels.
double classification_accuracy(const Vector& x, const Dataset& test);

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

}  // namespace ncprox::harness
