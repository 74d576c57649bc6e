#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncprox/data_io.hpp"
#include "ncprox/estimators.hpp"
#include "ncprox/model.hpp"
#include "ncprox/regularizer.hpp"
#include "ncprox/solver.hpp"
#include "ncprox/synth.hpp"

namespace ncprox::harness {

enum class Task { Classification, Regression };

std::string_view to_string(Task t) noexcept;
Task task_from_string(std::string_view name);

struct DatasetSpec {
  std::optional<std::string> path;          ///< libsvm file, relative to the spec file
  std::optional<SynthOptions> synthetic;    ///< exactly one of path / synthetic
  Task task = Task::Classification;
  std::optional<NormalizeMode> normalize;   ///< default: unit_row_norm for classification
  std::optional<std::size_t> dim;           ///< feature dimension override for files
  std::optional<double> test_fraction;      ///< held-out share, e.g. 0.2
  std::uint64_t split_seed = 0;

  bool operator==(const DatasetSpec&) const = default;
};

struct LossSpec {
  LossKind kind = LossKind::NllsSigmoid;
  std::optional<double> alpha;              ///< TLS only; default sqrt(10 n)

  bool operator==(const LossSpec&) const = default;
};

struct RegularizerSpec {
  RegKind kind = RegKind::L0;
  double lambda = 1e-4;
  std::optional<std::size_t> k;             ///< l0_ball radius; default ceil(0.2 d)
  std::vector<double> grid;                 ///< quantization points

  bool operator==(const RegularizerSpec&) const = default;
};

struct SolverSpec {
  Algorithm algorithm = Algorithm::PGD;
  Setting setting = Setting::FiniteSum;
  double c = 0.9;
  std::optional<std::size_t> T;
  std::optional<double> eps;
  std::optional<BatchSchedule> schedule;    ///< filled from n / eps when absent
  std::size_t residual_every = 10;
  std::optional<StepDecay> step_decay;
  Sampling sampling = Sampling::WithReplacement;
  std::optional<double> stop_residual;
  std::optional<std::string> label;         ///< default "<ALGORITHM>-<setting>"

  /// The label written to the CSV algorithm column.
  std::string display_label() const;

  bool operator==(const SolverSpec&) const = default;
};

struct OutputSpec {
  std::string csv = "trace.csv";
  std::optional<std::string> svg;
  std::optional<std::string> summary;
  std::optional<std::string> model_dir;     ///< one x_final vector file per run

  bool operator==(const OutputSpec&) const = default;
};

/// Starting point x0 = scale * N(0, I); scale 0 (the default) is the origin.
/// For l0-type regularizers the origin is often already a fixed point.
struct InitSpec {
  double scale = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const InitSpec&) const = default;
};

struct ExperimentSpec {
  DatasetSpec dataset;
  LossSpec loss;
  RegularizerSpec regularizer;
  std::optional<double> sigma2;             ///< estimated at x0 when absent
  InitSpec init;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds{0};
  OutputSpec outputs;

  bool operator==(const ExperimentSpec&) const = default;
};

/// Raised for any malformed or inconsistent experiment spec.
class SpecError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

/// Parses a JSON experiment spec. Unknown keys are errors.
ExperimentSpec parse_spec(std::string_view text);
ExperimentSpec load_spec(const std::filesystem::path& file);

/// Canonical JSON text with every field that is set.
std::string emit_spec(const ExperimentSpec& spec);

/// Structural checks that do not need the dataset (at least one solver,
/// seeds nonempty, exactly one dataset source, ...).
void validate_spec(const ExperimentSpec& spec);

}  // namespace ncprox::harness
