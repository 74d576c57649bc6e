#include "ncprox/harness/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ncprox/error.hpp"
#include "ncprox/harness/plot.hpp"
#include "ncprox/harness/quant.hpp"
#include "ncprox/harness/runner.hpp"
#include "ncprox/harness/selftest.hpp"
#include "ncprox/harness/spec.hpp"

namespace fs = std::filesystem;

namespace ncprox::harness {

namespace {

fs::path default_out_dir() {
  if (const char* env = std::getenv("NCPROX_OUT_DIR"); env && *env) return env;
  return fs::current_path();
}

fs::path resolve(const fs::path& dir, const std::string& p) {
  fs::path path(p);
  return path.is_relative() ? dir / path : path;
}

// Opens `path` for writing, creating parent directories.
std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || tok.find_first_not_of(" \t", used) != std::string::npos) {
      throw InvalidParameter("bad grid value '" + tok + "'");
    }
    grid.push_back(v);
  }
  if (grid.empty()) throw InvalidParameter("grid must be nonempty");
  return grid;
}

struct RunArgs {
  std::string spec;
  std::vector<std::uint64_t> seeds;
  std::size_t jobs = 1;
};

int cmd_run(const RunArgs& a, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  Problem problem;
  try {
    spec = load_spec(a.spec);
    if (!a.seeds.empty()) spec.seeds = a.seeds;
    validate_spec(spec);
    problem = build_problem(spec, fs::path(a.spec).parent_path());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  const auto runs = run_all(spec, problem, RunOptions{a.jobs});
  bool all_ok = true;
  for (const auto& r : runs) {
    out << "run " << r.run_id << ' ' << r.label << " seed=" << r.seed;
    switch (r.status) {
      case RunStatus::Ok: out << " ok"; break;
      case RunStatus::Diverged: out << " diverged"; break;
      case RunStatus::Failed: out << " failed"; break;
    }
    if (!r.trace.records.empty()) {
      const auto& last = r.trace.records.back();
      out << " t=" << last.t << " grad_evals=" << last.grad_evals << " F=" << format_number(last.F);
    }
    if (r.test_accuracy) out << " test_accuracy=" << format_number(*r.test_accuracy);
    if (r.test_accuracy_grid) out << " test_accuracy_grid=" << format_number(*r.test_accuracy_grid);
    if (!r.message.empty()) out << " (" << r.message << ')';
    out << '\n';
    all_ok = all_ok && r.status == RunStatus::Ok;
  }

  const fs::path csv_path = resolve(out_dir, spec.outputs.csv);
  {
    auto f = open_out(csv_path);
    write_trace_csv(f, runs);
  }
  out << "wrote " << csv_path.string() << '\n';
  if (spec.outputs.summary) {
    const fs::path p = resolve(out_dir, *spec.outputs.summary);
    auto f = open_out(p);
    write_summary(f, runs);
    out << "wrote " << p.string() << '\n';
  }
  if (spec.outputs.svg) {
    std::ifstream in(csv_path);
    const auto rows = read_trace_csv(in);
    const fs::path p = resolve(out_dir, *spec.outputs.svg);
    auto f = open_out(p);
    f << render_svg(rows, PlotOptions{});
    out << "wrote " << p.string() << '\n';
  }
  if (spec.outputs.model_dir) {
    const fs::path dir = resolve(out_dir, *spec.outputs.model_dir);
    for (const auto& r : runs) {
      if (r.trace.x_final.size() == 0) continue;
      auto f = open_out(dir / ("run_" + std::to_string(r.run_id) + ".txt"));
      for (Eigen::Index j = 0; j < r.trace.x_final.size(); ++j) f << format_number(r.trace.x_final[j]) << '\n';
    }
    out << "wrote models to " << dir.string() << '\n';
  }
  return all_ok ? kExitOk : kExitRuntime;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximal gradient methods for non-convex regularized problems"};
  app.require_subcommand(1);
  std::string out_dir_opt;
  app.add_option("--out", out_dir_opt, "Output directory (default: $NCPROX_OUT_DIR or the working directory)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run every (solver, seed) pair of an experiment spec");
  run->add_option("spec", run_args.spec, "Experiment spec (JSON)")->required();
  run->add_option("--seed", run_args.seeds, "Override the seed list (repeatable)");
  run->add_option("--jobs", run_args.jobs, "Parallel runs")->check(CLI::PositiveNumber);

  ProxSuiteOptions prox_opts;
  auto* sprox = app.add_subcommand("selftest-prox", "Prox operators against brute-force oracles");
  sprox->add_option("--cases", prox_opts.cases, "Cases per regularizer kind");
  sprox->add_option("--seed", prox_opts.seed, "Case generator seed");
  sprox->add_option("--l0-threshold-scale", prox_opts.l0_threshold_scale,
                    "Perturb the l0 threshold (mutation check; 1 = pristine)");

  GradSuiteOptions grad_opts;
  auto* sgrad = app.add_subcommand("selftest-grad", "Analytic gradients against central differences");
  sgrad->add_option("--cases", grad_opts.cases, "Cases per loss");
  sgrad->add_option("--seed", grad_opts.seed, "Case generator seed");

  std::string plot_csv, plot_x = "grad_evals", plot_y = "F", plot_svg, plot_title;
  bool linear_y = false;
  auto* plot = app.add_subcommand("plot", "SVG convergence plot from a trace CSV");
  plot->add_option("csv", plot_csv, "Trace CSV written by run")->required();
  plot->add_option("--x", plot_x, "x axis: grad_evals or t");
  plot->add_option("--y", plot_y, "y axis: F or exact_residual");
  plot->add_flag("--linear-y", linear_y, "Linear y axis (default log)");
  plot->add_option("--svg", plot_svg, "Output file (default: <csv stem>.svg)");
  plot->add_option("--title", plot_title, "Plot title");

  std::string q_model, q_grid, q_test;
  auto* quant = app.add_subcommand("eval-quant", "Test accuracy of a grid-projected model");
  quant->add_option("--model", q_model, "Model vector file")->required();
  quant->add_option("--grid", q_grid, "Comma-separated grid values, e.g. -1,1")->required();
  quant->add_option("--test", q_test, "libsvm test set")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const fs::path out_dir = out_dir_opt.empty() ? default_out_dir() : fs::path(out_dir_opt);

  try {
    if (*run) return cmd_run(run_args, out_dir, out, err);

    if (*sprox) {
      const auto report = run_prox_suite(prox_opts);
      report.print(out);
      return report.passed() ? kExitOk : kExitSelftest;
    }
    if (*sgrad) {
      const auto report = run_grad_suite(grad_opts);
      report.print(out);
      return report.passed() ? kExitOk : kExitSelftest;
    }

    if (*plot) {
      PlotOptions opt;
      std::vector<TraceRow> rows;
      try {
        opt.x = x_axis_from_string(plot_x);
        opt.y = y_axis_from_string(plot_y);
        opt.log_y = !linear_y;
        opt.title = plot_title;
        std::ifstream in(plot_csv);
        if (!in) throw InvalidInput("cannot open '" + plot_csv + "'");
        rows = read_trace_csv(in);
      } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
      }
      const fs::path target =
          plot_svg.empty() ? out_dir / (fs::path(plot_csv).stem().string() + ".svg") : resolve(out_dir, plot_svg);
      auto f = open_out(target);
      f << render_svg(rows, opt);
      out << "wrote " << target.string() << '\n';
      return kExitOk;
    }

    if (*quant) {
      QuantReport rep;
      try {
        const auto grid = parse_grid(q_grid);
        std::ifstream mf(q_model);
        if (!mf) throw InvalidInput("cannot open '" + q_model + "'");
        const Vector model = read_model_vector(mf);
        std::ifstream tf(q_test);
        if (!tf) throw InvalidInput("cannot open '" + q_test + "'");
        const Dataset test = load_quant_test_set(tf, static_cast<std::size_t>(model.size()));
        rep = evaluate_quantized(model, grid, test);
      } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
      }
      out << "accuracy " << format_number(rep.accuracy) << " (" << rep.correct << '/' << rep.test_samples
          << ") dim=" << rep.dim << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace ncprox::harness
