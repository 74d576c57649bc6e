#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ncprox::harness {

/// One CSV row of a run trace.
struct TraceRow {
  std::uint64_t run_id = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t t = 0;
  std::uint64_t grad_evals = 0;
  double F = 0.0;
  std::optional<double> exact_residual;
  std::uint64_t nnz = 0;
  double wall_ms = 0.0;
};

/// Parses a trace CSV; the header must match the documented columns exactly.
std::vector<TraceRow> read_trace_csv(std::istream& in);

enum class XAxis { GradEvals, Iteration };
enum class YAxis { Objective, Residual };

XAxis x_axis_from_string(std::string_view name);
YAxis y_axis_from_string(std::string_view name);

struct PlotOptions {
  XAxis x = XAxis::GradEvals;
  YAxis y = YAxis::Objective;
  bool log_y = true;
  std::string title;
};

/// Values below this are drawn at the floor on a log axis.
inline constexpr double kLogFloor = 1e-16;

/// One polyline per algorithm label, the median over seeds at each record
/// position. Labels ending in "-online" are solid, all others dashed.
std::string render_svg(const std::vector<TraceRow>& rows, const PlotOptions& options);

}  // namespace ncprox::harness
