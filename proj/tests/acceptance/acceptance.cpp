// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ncprox/bounds.hpp"
#include "ncprox/estimators.hpp"
#include "ncprox/harness/cli.hpp"
#include "ncprox/harness/runner.hpp"
#include "ncprox/harness/selftest.hpp"
#include "ncprox/harness/spec.hpp"
#include "ncprox/model.hpp"
#include "ncprox/regularizer.hpp"
#include "ncprox/rng.hpp"
#include "ncprox/solver.hpp"

using namespace ncprox;
using namespace ncprox::harness;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // <= 0 means no runtime requirement
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// (1/n) sum_i ||grad f_i(x) - grad f(x)||^2
double population_variance(const Objective& obj, const Vector& x) {
  const Vector g = full_gradient(obj, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < obj.n(); ++i) acc += (sample_loss_grad(obj, x, i).dense(obj.d()) - g).squaredNorm();
  return acc / static_cast<double>(obj.n());
}

ExperimentSpec nlls_l0_spec(std::size_t n, std::size_t d, std::uint64_t data_seed) {
  ExperimentSpec s;
  SynthOptions so;
  so.n = n;
  so.d = d;
  so.seed = data_seed;
  s.dataset.synthetic = so;
  s.loss.kind = LossKind::NllsSigmoid;
  s.regularizer.kind = RegKind::L0;
  s.regularizer.lambda = 1e-4;
  SolverSpec pgd;
  pgd.algorithm = Algorithm::PGD;
  pgd.T = 1;
  s.solvers = {pgd};
  return s;
}

// The NLLS + L0 instance shared by criteria 3 and 7.
const Problem& base_instance() {
  static const Problem p = build_problem(nlls_l0_spec(200, 50, 11));
  return p;
}

double evals_to_reach(const RunTrace& tr, double tau) {
  for (const auto& r : tr.records)
    if (r.exact_residual && *r.exact_residual <= tau) return static_cast<double>(r.grad_evals);
  return std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------------------

Outcome crit_prox() {
  const auto rep = run_prox_suite(ProxSuiteOptions{});
  std::size_t fails = 0;
  double worst = 0.0;
  for (const auto& r : rep.rows) {
    fails += r.failures;
    worst = std::max(worst, r.max_violation);
  }
  return {rep.passed(), std::to_string(rep.rows.size()) + " suites, failures=" + std::to_string(fails) +
                            ", max violation " + fmt("%.2e", worst)};
}

Outcome crit_grad() {
  const auto rep = run_grad_suite(GradSuiteOptions{});
  std::size_t fails = 0;
  for (const auto& r : rep.rows) fails += r.failures;
  return {rep.passed(), "losses=" + std::to_string(rep.rows.size()) + ", failures=" + std::to_string(fails)};
}

Outcome crit_pgd() {
  const Problem& p = base_instance();
  const Objective& obj = *p.objective;
  SolverConfig cfg;
  cfg.algorithm = Algorithm::PGD;
  cfg.c = 0.9;
  cfg.T = 500;
  cfg.residual_every = 1;
  const RunTrace tr = run_pgd(obj, cfg, p.x0);
  std::size_t increases = 0;
  double sum_sq = 0.0;
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    increases += tr.records[k].F > tr.records[k - 1].F;
    sum_sq += *tr.records[k].exact_residual * *tr.records[k].exact_residual;
  }
  const double T = 500.0, L = obj.L(), eta = 0.9 / L;
  const double rhs = 4.0 * (eta * eta * L * L + 1.0) * obj.f_x0() / (eta * (1.0 - eta * L) * T);
  BoundInputs in;
  in.T = T;
  in.delta_ub = obj.f_x0();
  const double lib = theoretical_bound(BoundKind::Thm1, BoundConstants::from(0.9, L), in);
  const double lhs = sum_sq / T;
  const bool ok = increases == 0 && lhs <= rhs + 1e-9 && std::abs(lib - rhs) <= 1e-12 * rhs;
  return {ok, "F increases=" + std::to_string(increases) + ", mean residual^2=" + fmt("%.4e", lhs) +
                  " <= bound " + fmt("%.4e", rhs)};
}

Outcome crit_variance() {
  auto data = std::make_shared<const Dataset>(
      normalize_features(synth_classification(SynthOptions{500, 30, 6, 0, PlantedKind::Gaussian, 0.1, 0, 10, 21}),
                         NormalizeMode::UnitRowNorm));
  const Objective obj(SmoothLoss{LossKind::NllsSigmoid, 1.0}, Regularizer::l0(1e-4), data,
                      estimate_smoothness(SmoothLoss{LossKind::NllsSigmoid, 1.0}, *data));
  CounterRng xr(5);
  Vector x(30);
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = 2.0 * xr.normal();
  const Vector g = full_gradient(obj, x);
  const double pop = population_variance(obj, x);
  bool ok = true;
  std::string detail;
  for (std::size_t m : {1u, 4u, 16u}) {
    CounterRng rng(100 + m);
    double acc = 0.0;
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) acc += (minibatch_grad(obj, x, m, rng).g - g).squaredNorm();
    const double ratio = acc / draws / (pop / static_cast<double>(m));
    ok = ok && ratio >= 0.9 && ratio <= 1.1;
    detail += "m=" + std::to_string(m) + " ratio " + fmt("%.4f", ratio) + "; ";
  }
  return {ok, detail};
}

Outcome crit_sarah() {
  const Problem& p = base_instance();
  const Objective& obj = *p.objective;
  double worst_anchor = 0.0;
  std::size_t anchors = 0, identical = 0, steps = 0;

  // Anchors inside a finite-sum run, measured from the solver's own g_t.
  SolverConfig cfg;
  cfg.algorithm = Algorithm::SPGR;
  cfg.setting = Setting::FiniteSum;
  cfg.c = 0.3;
  cfg.T = 150;
  cfg.schedule = make_spgr_finite_sum(obj.n());
  cfg.residual_every = 1000;
  const std::size_t q = std::get<SpgrFiniteSum>(cfg.schedule).q;
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent& e) {
    if (e.t % q != 0) return;
    const Vector gf = full_gradient(obj, e.x_t);
    worst_anchor = std::max(worst_anchor, (e.g_t - gf).norm() / std::max(gf.norm(), 1e-300));
    ++anchors;
  };
  run_spgr(obj, cfg, p.x0, hooks);

  // A zero move returns the previous estimate bit for bit.
  CounterRng rng(3), xr(4);
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(static_cast<Eigen::Index>(obj.d()));
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = xr.normal();
    EstimatorState st;
    AnchorSpec spec;
    spec.setting = trial % 2 ? Setting::Online : Setting::FiniteSum;
    spec.s1_size = 32;
    spec.q = 8;
    sarah_anchor(obj, x, spec, rng, st);
    for (int k = 0; k < 7; ++k) {
      const Vector before = st.g_prev;
      Vector next = st.x_prev;
      if (k % 2) next += 0.01 * Vector::Ones(next.size());  // alternate real and zero moves
      const Vector g = sarah_step(obj, st, next, 4, rng);
      if (k % 2 == 0) {
        ++steps;
        identical += std::memcmp(g.data(), before.data(), sizeof(double) * g.size()) == 0;
      }
    }
  }
  const bool ok = anchors > 0 && worst_anchor < 1e-12 && identical == steps;
  return {ok, std::to_string(anchors) + " anchors, max rel error " + fmt("%.1e", worst_anchor) + "; " +
                  std::to_string(identical) + "/" + std::to_string(steps) + " zero moves bit-identical"};
}

Outcome crit_recursion() {
  const Problem p = build_problem(nlls_l0_spec(100, 20, 31));
  const Objective& obj = *p.objective;
  const std::size_t s1 = 16, s2 = 4, q = 4;
  const double L = obj.L();
  CounterRng xr(9);
  Vector x0(20);
  for (Eigen::Index j = 0; j < x0.size(); ++j) x0[j] = xr.normal();

  std::vector<std::vector<double>> diff(q);  // per t: lhs - rhs for each seed
  std::vector<std::vector<double>> lhs(q), rhs(q);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SolverConfig cfg;
    cfg.algorithm = Algorithm::SPGR;
    cfg.setting = Setting::Online;
    cfg.c = 0.3;
    cfg.T = q;
    cfg.seed = seed;
    cfg.schedule = SpgrOnline{s1, s2, q};
    cfg.residual_every = 1000;
    std::vector<double> err(q), move(q);
    SolverHooks hooks;
    hooks.on_step = [&](const StepEvent& e) {
      err[e.t] = (e.g_t - full_gradient(obj, e.x_t)).squaredNorm();
      move[e.t] = (e.x_next - e.x_t).squaredNorm();
    };
    run_spgr(obj, cfg, x0, hooks);
    double path = 0.0;
    for (std::size_t t = 0; t < q; ++t) {
      const double r = L * L / static_cast<double>(s2) * path + err[0];
      lhs[t].push_back(err[t]);
      rhs[t].push_back(r);
      diff[t].push_back(err[t] - r);
      path += move[t];
    }
  }
  bool ok = true;
  std::string detail;
  for (std::size_t t = 1; t < q; ++t) {
    const auto d = mean_se(diff[t]);
    ok = ok && d.mean <= 3.0 * d.se;
    detail += "t=" + std::to_string(t) + " " + fmt("%.3e", mean_se(lhs[t]).mean) + "<=" +
              fmt("%.3e", mean_se(rhs[t]).mean) + "; ";
  }
  return {ok, detail};
}

Outcome crit_expectation() {
  const Problem& p = base_instance();
  const Objective& obj = *p.objective;
  const double L = obj.L();
  const std::size_t T = 300, m = 8;
  bool ok = true;
  std::string detail;

  for (int which = 0; which < 2; ++which) {
    const bool mb = which == 0;
    std::vector<double> per_run;
    double sigma2 = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      SolverConfig cfg;
      cfg.seed = seed;
      cfg.T = T;
      cfg.residual_every = 1;
      if (mb) {
        cfg.algorithm = Algorithm::MBSPG;
        cfg.setting = Setting::Online;
        cfg.c = 0.45;
        cfg.schedule = FixedBatch{m};
      } else {
        cfg.algorithm = Algorithm::SPGR;
        cfg.setting = Setting::FiniteSum;
        cfg.c = 0.3;
        cfg.schedule = make_spgr_finite_sum(obj.n());
      }
      SolverHooks hooks;
      // The variance bound only has to hold at the points the run visits.
      if (mb) hooks.on_step = [&](const StepEvent& e) { sigma2 = std::max(sigma2, population_variance(obj, e.x_t)); };
      const RunTrace tr = run_solver(obj, cfg, p.x0, hooks);
      double acc = 0.0;
      for (std::size_t k = 1; k < tr.records.size(); ++k) acc += std::pow(*tr.records[k].exact_residual, 2);
      per_run.push_back(acc / static_cast<double>(T));
    }
    BoundInputs in;
    in.T = static_cast<double>(T);
    in.delta_ub = obj.f_x0();
    double bound;
    if (mb) {
      in.s1_size = static_cast<double>(m);
      in.sigma2 = sigma2;
      bound = theoretical_bound(BoundKind::Thm2, BoundConstants::from(0.45, L), in);
    } else {
      bound = theoretical_bound(BoundKind::Thm3FiniteSum, BoundConstants::from(0.3, L), in);
    }
    const auto ms = mean_se(per_run);
    ok = ok && ms.mean <= bound + 3.0 * ms.se;
    detail += std::string(mb ? "MBSPG m=8 " : "SPGR-fs ") + fmt("%.3e", ms.mean) + " <= " + fmt("%.3e", bound) + "; ";
  }
  return {ok, detail};
}

Outcome crit_ordering() {
  // x0 = 0 is a fixed point of the l0 prox on this instance (every gradient
  // coordinate is below the hard threshold), so start from a fixed N(0, I) draw.
  const Problem p = build_problem(nlls_l0_spec(2000, 100, 41));
  Vector x0(100);
  CounterRng xr(99);
  for (Eigen::Index j = 0; j < x0.size(); ++j) x0[j] = xr.normal();
  CounterRng probe(0, 7);
  const Objective obj =
      make_objective(p.objective->loss(), p.objective->reg(), p.train, x0, std::nullopt, probe);
  const double eps = 1e-2;
  struct Variant {
    std::string name;
    Algorithm alg;
    Setting setting;
    double c;
  };
  const std::vector<Variant> variants = {{"SPGR-finite_sum", Algorithm::SPGR, Setting::FiniteSum, 0.3},
                                         {"SPGR-online", Algorithm::SPGR, Setting::Online, 0.3},
                                         {"MBSPG-online", Algorithm::MBSPG, Setting::Online, 0.45},
                                         {"SPGRIMB-online", Algorithm::SPGRIMB, Setting::Online, 0.3}};
  std::vector<double> med;
  std::string detail;
  for (const auto& v : variants) {
    std::vector<double> evals;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SolverConfig cfg;
      cfg.algorithm = v.alg;
      cfg.setting = v.setting;
      cfg.c = v.c;
      cfg.eps = eps;
      cfg.seed = seed;
      cfg.residual_every = 1;
      cfg.stop_residual = eps;
      if (v.alg == Algorithm::SPGRIMB) cfg.schedule = SpgrImb{1};
      evals.push_back(evals_to_reach(run_solver(obj, cfg, x0), eps));
    }
    med.push_back(median(evals));
    detail += v.name + " " + fmt("%.0f", med.back()) + "; ";
  }
  const bool ok = med[0] < med[1] && med[1] < med[2] && med[3] <= 2.0 * med[1];
  return {ok, detail};
}

struct Formulas {
  double c, L, eta;
  double c1() const { return (2 * c * (1 - 2 * c) + 2) / (c * (1 - 2 * c)); }
  double c2() const { return (6 - 4 * c) / (1 - 2 * c); }
  double gamma() const { return 4 * L * L + 1 / (eta * eta) + 2 * L / eta; }
  double theta() const { return (1 - 3 * eta * L) / (2 * eta); }
  double pgd() const { return 4 * (eta * eta * L * L + 1) / (eta * (1 - eta * L)); }
};

Outcome crit_formulas() {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  CounterRng rng(2024);
  std::size_t checks = 0, bad = 0;
  auto check = [&](bool ok) {
    ++checks;
    bad += !ok;
  };
  for (int trial = 0; trial < 50; ++trial) {
    const double c = 0.01 + 0.31 * rng.uniform01();
    const double L = std::pow(10.0, -2.0 + 4.0 * rng.uniform01());
    const double sigma2 = std::pow(10.0, -3.0 + 4.0 * rng.uniform01());
    const double eps = std::pow(10.0, -3.0 + 2.5 * rng.uniform01());
    const double delta = std::pow(10.0, -1.0 + 2.0 * rng.uniform01());
    const double T = 1 + static_cast<double>(rng.uniform_index(10000));
    const std::size_t b = 1 + rng.uniform_index(8), s = 1 + rng.uniform_index(30), t = rng.uniform_index(1000);
    const Formulas f{c, L, c / L};
    const auto k = BoundConstants::from(c, L);
    const double th = f.theta(), ga = f.gamma(), eta = f.eta;

    check(close(k.c1, f.c1()));
    check(close(k.c2, f.c2()));
    check(close(k.gamma, ga));
    check(close(k.theta, th));
    check(close(k.pgd_factor, f.pgd()));
    check(close(mbspg_c1(c), f.c1()));
    check(close(mbspg_c2(c), f.c2()));

    const double m_raw = 2 * f.c1() * sigma2 / (eps * eps);
    const auto m = schedule_fixed_batch(c, sigma2, eps);
    check(static_cast<double>(m) >= m_raw && static_cast<double>(m) < std::max(1.0, m_raw) + 1.0);
    check(schedule_increasing_batch(t, b) == b * (t + 1));
    check(spgr_imb_schedule(s, b) == ImbStage{b * b * s * s, b * s, b * s});

    check(close(pgd_horizon(k, delta, eps), f.pgd() * delta / (eps * eps)));
    check(close(mbspg_horizon(k, delta, eps), 2 * f.c2() * delta / (eta * eps * eps)));
    check(close(spgr_online_anchor_size(k, sigma2, eps), (ga + 4 * th * L) * sigma2 / (th * L * eps * eps)));
    check(close(spgr_horizon(k, delta, eps, false), (2 * th + ga * eta) * delta / (eta * th * eps * eps)));
    check(close(spgr_horizon(k, delta, eps, true), 2 * (2 * th + ga * eta) * delta / (eta * th * eps * eps)));

    BoundInputs in;
    in.T = T;
    in.sigma2 = sigma2;
    in.delta_ub = delta;
    check(close(theoretical_bound(BoundKind::Thm1, k, in), f.pgd() * delta / T));
    in.s1_size = static_cast<double>(m);
    check(close(theoretical_bound(BoundKind::Thm2, k, in), f.c1() * sigma2 / m + f.c2() * delta / (eta * T)));
    const double opt3 = (2 * th * delta + ga * eta * delta) / (eta * th * T);
    check(close(theoretical_bound(BoundKind::Thm3Online, k, in), opt3 + (ga + 4 * th * L) * sigma2 / (2 * th * L * m)));
    check(close(theoretical_bound(BoundKind::Thm3FiniteSum, k, in), opt3));
    check(close(theoretical_bound(BoundKind::Thm4FiniteSum, k, in), opt3));
    in.s1_size.reset();
    in.b = static_cast<double>(b);
    check(close(theoretical_bound(BoundKind::Thm2, k, in),
                f.c1() * sigma2 * (std::log(T) + 1) / (b * T) + f.c2() * delta / (eta * T)));
    check(close(theoretical_bound(BoundKind::Thm4Online, k, in),
                opt3 + (4 * th * L + ga) * sigma2 * (0.5 * std::log(2 * T / b) + 1) / (2 * b * th * L * T)));
  }
  return {bad == 0, std::to_string(checks - bad) + "/" + std::to_string(checks) + " formula checks over 50 sets"};
}

std::string strip_wall(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.rfind(',')) << '\n';
  return out.str();
}

Outcome crit_determinism() {
  const fs::path dir = fs::temp_directory_path() / "ncprox_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentSpec s = nlls_l0_spec(300, 40, 5);
  s.dataset.test_fraction = 0.2;
  s.solvers.clear();
  auto add = [&](Algorithm a, Setting st, double c, std::optional<BatchSchedule> sch) {
    SolverSpec sp;
    sp.algorithm = a;
    sp.setting = st;
    sp.c = c;
    sp.T = 120;
    sp.residual_every = 3;
    sp.schedule = sch;
    s.solvers.push_back(sp);
  };
  add(Algorithm::PGD, Setting::FiniteSum, 0.9, std::nullopt);
  add(Algorithm::MBSPG, Setting::Online, 0.45, FixedBatch{8});
  add(Algorithm::MBSPG, Setting::Online, 0.45, IncreasingBatch{1});
  add(Algorithm::SPGR, Setting::Online, 0.3, make_spgr_online(64));
  add(Algorithm::SPGR, Setting::FiniteSum, 0.3, std::nullopt);
  add(Algorithm::SPGRIMB, Setting::Online, 0.3, SpgrImb{1});
  s.seeds = {0, 1, 2};
  {
    std::ofstream f(dir / "spec.json");
    f << emit_spec(s);
  }
  std::ostringstream sink;
  const std::string spec = (dir / "spec.json").string();
  const std::string a = (dir / "a").string(), b = (dir / "b").string();
  const char* argv_a[] = {"ncprox", "--out", a.c_str(), "run", spec.c_str()};
  const char* argv_b[] = {"ncprox", "--out", b.c_str(), "run", spec.c_str(), "--jobs", "4"};
  const int ra = cli_main(5, argv_a, sink, sink);
  const int rb = cli_main(7, argv_b, sink, sink);
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  const std::string ca = slurp(fs::path(a) / "trace.csv"), cb = slurp(fs::path(b) / "trace.csv");
  const bool same = !ca.empty() && strip_wall(ca) == strip_wall(cb);
  std::size_t lines = std::count(ca.begin(), ca.end(), '\n');
  return {ra == 0 && rb == 0 && same, std::to_string(lines) + " CSV lines, 18 runs, " +
                                          (same ? "identical" : "DIFFERENT") + " with --jobs 1 vs 4"};
}

Outcome crit_quantization() {
  ExperimentSpec s;
  SynthOptions so;
  so.n = 1500;
  so.d = 20;
  so.row_nnz = 5;
  so.planted = PlantedKind::Sign;
  so.planted_nnz = 20;
  so.noise = 0.0;
  so.seed = 77;
  s.dataset.synthetic = so;
  s.dataset.test_fraction = 0.2;
  s.loss.kind = LossKind::NllsSigmoid;
  s.regularizer = {RegKind::QuantizationPenalty, 1.0, std::nullopt, {-1.0, 1.0}};
  SolverSpec sp;
  sp.algorithm = Algorithm::SPGR;
  sp.setting = Setting::FiniteSum;
  sp.c = 0.3;
  sp.T = 5000;
  sp.residual_every = 100;
  s.solvers = {sp};
  const Problem p = build_problem(s);
  const Objective& obj = *p.objective;
  const auto& grid = obj.reg().grid();

  std::size_t bad_nnz = 0, non_finite = 0, records = 0;
  SolverHooks hooks;
  hooks.on_step = [&](const StepEvent& e) {
    non_finite += !e.x_next.allFinite();
  };
  const RunTrace tr = run_solver(obj, make_solver_config(sp, 0, obj), p.x0, hooks);
  // Replay the records against the iterates: nnz within [0, d] and monotone grad_evals.
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    ++records;
    const auto& r = tr.records[k];
    bad_nnz += r.nnz > obj.d() || (k > 0 && r.grad_evals < tr.records[k - 1].grad_evals);
  }
  bad_nnz += tr.records.back().nnz != static_cast<std::size_t>((tr.x_final.array() != 0.0).count());
  const Vector xq = project_to_grid(grid, tr.x_final);
  std::size_t off_grid = 0;
  for (Eigen::Index j = 0; j < xq.size(); ++j) off_grid += std::find(grid.begin(), grid.end(), xq[j]) == grid.end();
  const double acc = classification_accuracy(xq, *p.test);
  const bool ok = acc >= 0.9 && bad_nnz == 0 && non_finite == 0 && off_grid == 0 && tr.records.size() <= 5001;
  return {ok, "test accuracy of quantized model " + fmt("%.4f", acc) + " after " +
                  std::to_string(tr.records.size() - 1) + " iterations; invariant violations " +
                  std::to_string(bad_nnz + non_finite + off_grid) + " over " + std::to_string(records) + " records"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "prox-oracle agreement", 10, crit_prox},
      {2, "gradient correctness", 5, crit_grad},
      {3, "PGD descent and deterministic bound", 10, crit_pgd},
      {4, "mini-batch variance contract", 30, crit_variance},
      {5, "SARAH exactness", 0, crit_sarah},
      {6, "recursive estimator error Monte-Carlo", 120, crit_recursion},
      {7, "MB-SPG / SPGR expectation bounds", 300, crit_expectation},
      {8, "complexity ordering", 300, crit_ordering},
      {9, "schedule and bound formulas", 0, crit_formulas},
      {10, "CSV determinism", 0, crit_determinism},
      {11, "quantization pipeline", 120, crit_quantization},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += " [runtime limit " + fmt("%.0f", c.limit_s) + " s exceeded]";
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << " (" << fmt("%.2f", secs)
              << " s): " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
