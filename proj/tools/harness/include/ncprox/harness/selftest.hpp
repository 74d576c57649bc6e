#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ncprox::harness {

struct SuiteRow {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_violation = 0.0;  ///< largest amount by which the check was missed
  std::string note;

  bool passed() const noexcept { return failures == 0; }
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
  bool passed() const noexcept;
  void print(std::ostream& out) const;
};

struct ProxSuiteOptions {
  std::size_t cases = 1000;
  std::uint64_t seed = 1;
  /// Multiplies the hard-threshold constant of the l0 prox under test. Any
  /// value other than 1 is a deliberate mutation that the suite must catch.
  double l0_threshold_scale = 1.0;
};

/// Oracle agreement for every regularizer kind: separable kinds against the
/// 1-D brute-force oracle on x in [-10, 10], eta in [1e-3, 10], lambda in
/// [1e-4, 10]; the l0 ball against exhaustive support enumeration. Also
/// checks that a zero-dimension input is rejected.
SuiteReport run_prox_suite(const ProxSuiteOptions& options = {});

struct GradSuiteOptions {
  std::size_t cases = 100;
  std::uint64_t seed = 2;
  double tolerance = 1e-5;
};

/// Analytic full gradients against central differences, per loss.
SuiteReport run_grad_suite(const GradSuiteOptions& options = {});

}  // namespace ncprox::harness
