#include "ncprox/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "ncprox/data_io.hpp"
#include "ncprox/error.hpp"

namespace ncprox::harness {

namespace {

constexpr std::uint64_t kSigmaStream = 0x7369676d61;  // sigma2 probe draws
constexpr std::uint64_t kInitStream = 0x696e6974;      // starting point

Dataset load_dataset(const ExperimentSpec& spec, const std::filesystem::path& spec_dir) {
  const auto& ds = spec.dataset;
  if (ds.synthetic) {
    return ds.task == Task::Classification ? synth_classification(*ds.synthetic)
                                           : synth_regression(*ds.synthetic);
  }
  std::filesystem::path p(*ds.path);
  if (p.is_relative() && !spec_dir.empty()) p = spec_dir / p;
  std::ifstream in(p);
  if (!in) throw InvalidInput("cannot open dataset '" + p.string() + "'");
  return parse_libsvm(in, ds.dim);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double classification_accuracy(const Vector& x, const Dataset& test) {
  if (static_cast<std::size_t>(x.size()) != test.d()) {
    throw InvalidInput("model dimension " + std::to_string(x.size()) + " does not match test set dimension " +
                       std::to_string(test.d()));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.n(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-test.row(i).dot(x)));
    const double pred = p > 0.5 ? 1.0 : 0.0;
    correct += pred == test.label(i);
  }
  return static_cast<double>(correct) / static_cast<double>(test.n());
}

Problem build_problem(const ExperimentSpec& spec, const std::filesystem::path& spec_dir) {
  validate_spec(spec);
  Dataset data = load_dataset(spec, spec_dir);
  const bool classify = spec.dataset.task == Task::Classification;
  if (classify) data = binarize_labels(data);
  const NormalizeMode mode =
      spec.dataset.normalize.value_or(classify ? NormalizeMode::UnitRowNorm : NormalizeMode::None);
  data = normalize_features(data, mode);

  Problem p;
  if (spec.dataset.test_fraction) {
    auto [train, test] = train_test_split(data, 1.0 - *spec.dataset.test_fraction, spec.dataset.split_seed);
    p.train = std::make_shared<const Dataset>(std::move(train));
    p.test = std::make_shared<const Dataset>(std::move(test));
  } else {
    p.train = std::make_shared<const Dataset>(std::move(data));
  }

  const std::size_t n = p.train->n();
  const std::size_t d = p.train->d();
  SmoothLoss loss{spec.loss.kind, 1.0};
  if (spec.loss.kind == LossKind::TruncatedLS) {
    loss = SmoothLoss::truncated_ls(spec.loss.alpha.value_or(std::sqrt(10.0 * static_cast<double>(n))));
  }
  const auto& rs = spec.regularizer;
  Regularizer reg = Regularizer::l0(rs.lambda);
  switch (rs.kind) {
    case RegKind::L0: break;
    case RegKind::LHalf: reg = Regularizer::l_half(rs.lambda); break;
    case RegKind::LTwoThirds: reg = Regularizer::l_two_thirds(rs.lambda); break;
    case RegKind::L0BallIndicator:
      reg = Regularizer::l0_ball(rs.k.value_or(static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(d)))));
      break;
    case RegKind::QuantizationPenalty: reg = Regularizer::quantization(rs.lambda, rs.grid); break;
    case RegKind::L1Baseline: reg = Regularizer::l1(rs.lambda); break;
  }
  p.x0 = Vector::Zero(static_cast<Eigen::Index>(d));
  if (spec.init.scale > 0.0) {
    CounterRng init(spec.init.seed, kInitStream);
    for (Eigen::Index j = 0; j < p.x0.size(); ++j) p.x0[j] = spec.init.scale * init.normal();
  }
  CounterRng probe(0, kSigmaStream);
  p.objective = make_objective(loss, reg, p.train, p.x0, spec.sigma2, probe);
  return p;
}

SolverConfig make_solver_config(const SolverSpec& s, std::uint64_t seed, const Objective& obj) {
  SolverConfig cfg;
  cfg.algorithm = s.algorithm;
  cfg.setting = s.setting;
  cfg.c = s.c;
  cfg.T = s.T;
  cfg.eps = s.eps;
  cfg.seed = seed;
  cfg.residual_every = s.residual_every;
  cfg.step_decay = s.step_decay;
  cfg.sampling = s.sampling;
  cfg.stop_residual = s.stop_residual;
  if (s.schedule) {
    cfg.schedule = *s.schedule;
    return cfg;
  }
  const std::string who = s.display_label();
  switch (s.algorithm) {
    case Algorithm::PGD:
    case Algorithm::HeuristicQSGD: cfg.schedule = FixedBatch{1}; break;
    case Algorithm::MBSPG:
      if (!s.eps) throw SpecError(who + ": MBSPG with an explicit T needs a schedule");
      cfg.schedule = FixedBatch{1};  // replaced from eps
      break;
    case Algorithm::SPGR:
      if (s.setting == Setting::FiniteSum) {
        cfg.schedule = make_spgr_finite_sum(obj.n());
      } else {
        if (!s.eps) throw SpecError(who + ": online SPGR with an explicit T needs a schedule");
        cfg.schedule = make_spgr_online(1);  // replaced from eps
      }
      break;
    case Algorithm::SPGRIMB: cfg.schedule = SpgrImb{1}; break;
  }
  return cfg;
}

namespace {

RunOutcome execute(const ExperimentSpec& spec, const Problem& problem, std::size_t solver_index,
                   std::uint64_t seed, std::size_t run_id) {
  const SolverSpec& s = spec.solvers[solver_index];
  RunOutcome out;
  out.run_id = run_id;
  out.solver_index = solver_index;
  out.label = s.display_label();
  out.seed = seed;

  const Objective& obj = *problem.objective;
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> times{0.0};
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent&) {
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
  };
  try {
    out.trace = run_solver(obj, make_solver_config(s, seed, obj), problem.x0, hooks);
  } catch (const DivergedError& e) {
    out.status = RunStatus::Diverged;
    out.message = e.what();
    out.trace = e.trace();
  } catch (const std::exception& e) {
    out.status = RunStatus::Failed;
    out.message = e.what();
  }
  times.resize(out.trace.records.size(), times.empty() ? 0.0 : times.back());
  out.wall_ms = std::move(times);

  if (out.status == RunStatus::Ok && problem.test && spec.dataset.task == Task::Classification) {
    out.test_accuracy = classification_accuracy(out.trace.x_final, *problem.test);
    if (obj.reg().kind() == RegKind::QuantizationPenalty) {
      out.test_accuracy_grid = classification_accuracy(project_to_grid(obj.reg().grid(), out.trace.x_final),
                                                       *problem.test);
    }
  }
  return out;
}

}  // namespace

std::vector<RunOutcome> run_all(const ExperimentSpec& spec, const Problem& problem, const RunOptions& options) {
  struct Job {
    std::size_t solver;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t si = 0; si < spec.solvers.size(); ++si)
    for (std::uint64_t seed : spec.seeds) jobs.push_back({si, seed});

  std::vector<RunOutcome> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      results[k] = execute(spec, problem, jobs[k].solver, jobs[k].seed, k);
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return results;
}

void write_trace_csv(std::ostream& out, const std::vector<RunOutcome>& runs) {
  out << kCsvHeader << '\n';
  char wall[32];
  for (const auto& run : runs) {
    for (std::size_t k = 0; k < run.trace.records.size(); ++k) {
      const auto& r = run.trace.records[k];
      std::snprintf(wall, sizeof(wall), "%.3f", k < run.wall_ms.size() ? run.wall_ms[k] : 0.0);
      out << run.run_id << ',' << run.label << ',' << run.seed << ',' << r.t << ',' << r.grad_evals << ','
          << format_number(r.F) << ',' << (r.exact_residual ? format_number(*r.exact_residual) : "") << ','
          << r.nnz << ',' << wall << '\n';
    }
  }
}

namespace {

// First grad_evals at which a measured residual is <= tau; infinity if never.
double evals_to_reach(const RunTrace& trace, double tau) {
  for (const auto& r : trace.records)
    if (r.exact_residual && *r.exact_residual <= tau) return static_cast<double>(r.grad_evals);
  return std::numeric_limits<double>::infinity();
}

// Median with unreached runs counted as infinity.
std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  const double med = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  if (!std::isfinite(med)) return std::nullopt;
  return med;
}

std::string_view status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

nlohmann::json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

}  // namespace

void write_summary(std::ostream& out, const std::vector<RunOutcome>& runs) {
  using nlohmann::json;
  json per_run = json::array();
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunOutcome*>> groups;
  for (const auto& run : runs) {
    if (!groups.count(run.label)) order.push_back(run.label);
    groups[run.label].push_back(&run);
    json j = {{"run_id", run.run_id},
              {"algorithm", run.label},
              {"seed", run.seed},
              {"status", status_name(run.status)}};
    if (!run.message.empty()) j["message"] = run.message;
    if (!run.trace.records.empty()) {
      const auto& last = run.trace.records.back();
      j["iterations"] = last.t;
      j["final_F"] = number_or_null(last.F);
      j["grad_evals"] = last.grad_evals;
      j["residual_evals"] = run.trace.residual_evals;
      j["best_residual"] = number_or_null(run.trace.best_residual);
      j["R"] = run.trace.R;
      j["horizon"] = run.trace.horizon;
      j["anchor_iters"] = run.trace.anchor_iters;
      j["inner_iters"] = run.trace.inner_iters;
      j["stopped_early"] = run.trace.stopped_early;
    }
    if (run.test_accuracy) j["test_accuracy"] = *run.test_accuracy;
    if (run.test_accuracy_grid) j["test_accuracy_grid"] = *run.test_accuracy_grid;
    per_run.push_back(std::move(j));
  }

  json algorithms = json::object();
  for (const auto& label : order) {
    json thresholds = json::object();
    for (double tau : kSummaryThresholds) {
      std::vector<double> evals;
      std::size_t reached = 0;
      for (const auto* run : groups[label]) {
        const double e = run->status == RunStatus::Failed ? std::numeric_limits<double>::infinity()
                                                          : evals_to_reach(run->trace, tau);
        reached += std::isfinite(e);
        evals.push_back(e);
      }
      thresholds[format_number(tau)] = {{"median_grad_evals", number_or_null(median(evals))},
                                        {"reached", reached},
                                        {"runs", evals.size()}};
    }
    algorithms[label] = {{"thresholds", thresholds}};
  }
  json j = {{"runs", per_run}, {"algorithms", algorithms}};
  out << j.dump(2) << '\n';
}

}  // namespace ncprox::harness
