#include "ncprox/harness/spec.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ncprox::harness {

using nlohmann::json;

std::string_view to_string(Task t) noexcept {
  return t == Task::Classification ? "classification" : "regression";
}

Task task_from_string(std::string_view name) {
  if (name == "classification") return Task::Classification;
  if (name == "regression") return Task::Regression;
  throw SpecError("unknown task '" + std::string(name) + "' (expected classification or regression)");
}

std::string SolverSpec::display_label() const {
  if (label) return *label;
  return std::string(ncprox::to_string(algorithm)) + "-" + std::string(ncprox::to_string(setting));
}

namespace {

// Reads members of one JSON object and rejects any key that was never read.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw SpecError(where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& at(const char* key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw SpecError(where_ + ": missing required key '" + key + "'");
    return j_.at(key);
  }

  template <class T>
  T get(const char* key) {
    const json& v = at(key);
    try {
      return convert<T>(v);
    } catch (const json::exception&) {
      throw SpecError(where_ + "." + key + ": wrong type");
    }
  }

  template <class T>
  std::optional<T> opt(const char* key) {
    if (!has(key)) return std::nullopt;
    return get<T>(key);
  }

  template <class T>
  T get_or(const char* key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw SpecError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  template <class T>
  static T convert(const json& v) {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw json::type_error::create(302, "number expected", &v);
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw json::type_error::create(302, "nonnegative integer expected", &v);
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw json::type_error::create(302, "string expected", &v);
    }
    return v.get<T>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class F>
auto named(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(where + ": " + e.what());
  }
}

SynthOptions parse_synthetic(const json& j) {
  Fields f(j, "dataset.synthetic");
  SynthOptions o;
  o.n = f.get<std::size_t>("n");
  o.d = f.get<std::size_t>("d");
  o.row_nnz = f.get_or<std::size_t>("row_nnz", std::min<std::size_t>(o.d, 5));
  o.planted_nnz = f.get_or<std::size_t>("planted_nnz", 0);
  if (f.has("planted")) {
    const auto name = f.get<std::string>("planted");
    o.planted = named(f.path("planted"), [&] { return planted_kind_from_string(name); });
  }
  o.noise = f.get_or<double>("noise", 0.0);
  o.outlier_fraction = f.get_or<double>("outlier_fraction", 0.0);
  o.outlier_scale = f.get_or<double>("outlier_scale", 10.0);
  o.seed = f.get_or<std::uint64_t>("seed", 0);
  f.finish();
  return o;
}

DatasetSpec parse_dataset(const json& j) {
  Fields f(j, "dataset");
  DatasetSpec d;
  d.path = f.opt<std::string>("path");
  if (f.has("synthetic")) d.synthetic = parse_synthetic(f.at("synthetic"));
  if (f.has("task")) d.task = task_from_string(f.get<std::string>("task"));
  if (f.has("normalize")) {
    const auto name = f.get<std::string>("normalize");
    d.normalize = named(f.path("normalize"), [&] { return normalize_mode_from_string(name); });
  }
  d.dim = f.opt<std::size_t>("dim");
  d.test_fraction = f.opt<double>("test_fraction");
  d.split_seed = f.get_or<std::uint64_t>("split_seed", 0);
  f.finish();
  return d;
}

LossSpec parse_loss(const json& j) {
  Fields f(j, "loss");
  LossSpec l;
  const auto kind = f.get<std::string>("kind");
  l.kind = named(f.path("kind"), [&] { return loss_kind_from_string(kind); });
  l.alpha = f.opt<double>("alpha");
  f.finish();
  return l;
}

RegularizerSpec parse_regularizer(const json& j) {
  Fields f(j, "regularizer");
  RegularizerSpec r;
  const auto kind = f.get<std::string>("kind");
  r.kind = named(f.path("kind"), [&] { return reg_kind_from_string(kind); });
  r.lambda = f.get_or<double>("lambda", r.kind == RegKind::QuantizationPenalty ? 1.0 : 1e-4);
  r.k = f.opt<std::size_t>("k");
  if (f.has("grid")) r.grid = f.get<std::vector<double>>("grid");
  f.finish();
  return r;
}

BatchSchedule parse_schedule(const json& j) {
  Fields f(j, "schedule");
  const auto kind = f.get<std::string>("kind");
  BatchSchedule s;
  if (kind == "fixed") {
    s = FixedBatch{f.get<std::size_t>("m")};
  } else if (kind == "increasing") {
    s = IncreasingBatch{f.get<std::size_t>("b")};
  } else if (kind == "spgr_online") {
    const auto s1 = f.get<std::size_t>("s1");
    SpgrOnline on = named("schedule", [&] { return make_spgr_online(s1); });
    if (f.has("s2")) on.s2_size = on.q = f.get<std::size_t>("s2");
    s = on;
  } else if (kind == "spgr_finite_sum") {
    s = SpgrFiniteSum{f.get<std::size_t>("q")};
  } else if (kind == "spgr_imb") {
    s = SpgrImb{f.get<std::size_t>("b")};
  } else {
    throw SpecError("schedule: unknown kind '" + kind +
                    "' (expected fixed, increasing, spgr_online, spgr_finite_sum, spgr_imb)");
  }
  f.finish();
  return s;
}

SolverSpec parse_solver(const json& j, std::size_t index) {
  Fields f(j, "solvers[" + std::to_string(index) + "]");
  SolverSpec s;
  const auto alg = f.get<std::string>("algorithm");
  s.algorithm = named(f.path("algorithm"), [&] { return algorithm_from_string(alg); });
  if (f.has("setting")) {
    const auto name = f.get<std::string>("setting");
    s.setting = named(f.path("setting"), [&] { return setting_from_string(name); });
  }
  s.c = f.get_or<double>("c", default_step_fraction(s.algorithm));
  s.T = f.opt<std::size_t>("T");
  s.eps = f.opt<double>("eps");
  if (f.has("schedule")) s.schedule = parse_schedule(f.at("schedule"));
  s.residual_every = f.get_or<std::size_t>("residual_every", 10);
  if (f.has("step_decay")) s.step_decay = StepDecay{f.get<std::size_t>("step_decay")};
  if (f.has("sampling")) {
    const auto name = f.get<std::string>("sampling");
    s.sampling = named(f.path("sampling"), [&] { return sampling_from_string(name); });
  }
  s.stop_residual = f.opt<double>("stop_residual");
  s.label = f.opt<std::string>("label");
  f.finish();
  return s;
}

InitSpec parse_init(const json& j) {
  Fields f(j, "init");
  InitSpec i;
  i.scale = f.get_or<double>("scale", 0.0);
  i.seed = f.get_or<std::uint64_t>("seed", 0);
  f.finish();
  return i;
}

OutputSpec parse_outputs(const json& j) {
  Fields f(j, "outputs");
  OutputSpec o;
  o.csv = f.get_or<std::string>("csv", o.csv);
  o.svg = f.opt<std::string>("svg");
  o.summary = f.opt<std::string>("summary");
  o.model_dir = f.opt<std::string>("model_dir");
  f.finish();
  return o;
}

json schedule_json(const BatchSchedule& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FixedBatch>) return {{"kind", "fixed"}, {"m", v.m}};
        if constexpr (std::is_same_v<T, IncreasingBatch>) return {{"kind", "increasing"}, {"b", v.b}};
        if constexpr (std::is_same_v<T, SpgrOnline>) {
          return {{"kind", "spgr_online"}, {"s1", v.s1_size}, {"s2", v.s2_size}};
        }
        if constexpr (std::is_same_v<T, SpgrFiniteSum>) return {{"kind", "spgr_finite_sum"}, {"q", v.q}};
        if constexpr (std::is_same_v<T, SpgrImb>) return {{"kind", "spgr_imb"}, {"b", v.b}};
      },
      s);
}

}  // namespace

ExperimentSpec parse_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("spec is not valid JSON: ") + e.what());
  }
  Fields f(j, "spec");
  ExperimentSpec spec;
  spec.dataset = parse_dataset(f.at("dataset"));
  spec.loss = parse_loss(f.at("loss"));
  spec.regularizer = parse_regularizer(f.at("regularizer"));
  spec.sigma2 = f.opt<double>("sigma2");
  if (f.has("init")) spec.init = parse_init(f.at("init"));
  const json& solvers = f.at("solvers");
  if (!solvers.is_array()) throw SpecError("spec.solvers: expected an array");
  spec.solvers.clear();
  for (std::size_t i = 0; i < solvers.size(); ++i) spec.solvers.push_back(parse_solver(solvers[i], i));
  if (f.has("seeds")) spec.seeds = f.get<std::vector<std::uint64_t>>("seeds");
  if (f.has("outputs")) spec.outputs = parse_outputs(f.at("outputs"));
  f.finish();
  validate_spec(spec);
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SpecError("cannot open spec file '" + file.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string emit_spec(const ExperimentSpec& spec) {
  json ds = json::object();
  if (spec.dataset.path) ds["path"] = *spec.dataset.path;
  if (spec.dataset.synthetic) {
    const auto& o = *spec.dataset.synthetic;
    ds["synthetic"] = {{"n", o.n},
                       {"d", o.d},
                       {"row_nnz", o.row_nnz},
                       {"planted_nnz", o.planted_nnz},
                       {"planted", ncprox::to_string(o.planted)},
                       {"noise", o.noise},
                       {"outlier_fraction", o.outlier_fraction},
                       {"outlier_scale", o.outlier_scale},
                       {"seed", o.seed}};
  }
  ds["task"] = to_string(spec.dataset.task);
  if (spec.dataset.normalize) ds["normalize"] = ncprox::to_string(*spec.dataset.normalize);
  if (spec.dataset.dim) ds["dim"] = *spec.dataset.dim;
  if (spec.dataset.test_fraction) ds["test_fraction"] = *spec.dataset.test_fraction;
  ds["split_seed"] = spec.dataset.split_seed;

  json loss = {{"kind", ncprox::to_string(spec.loss.kind)}};
  if (spec.loss.alpha) loss["alpha"] = *spec.loss.alpha;

  json reg = {{"kind", ncprox::to_string(spec.regularizer.kind)}, {"lambda", spec.regularizer.lambda}};
  if (spec.regularizer.k) reg["k"] = *spec.regularizer.k;
  if (!spec.regularizer.grid.empty()) reg["grid"] = spec.regularizer.grid;

  json solvers = json::array();
  for (const auto& s : spec.solvers) {
    json js = {{"algorithm", ncprox::to_string(s.algorithm)},
               {"setting", ncprox::to_string(s.setting)},
               {"c", s.c},
               {"residual_every", s.residual_every},
               {"sampling", ncprox::to_string(s.sampling)}};
    if (s.T) js["T"] = *s.T;
    if (s.eps) js["eps"] = *s.eps;
    if (s.schedule) js["schedule"] = schedule_json(*s.schedule);
    if (s.step_decay) js["step_decay"] = s.step_decay->halve_every;
    if (s.stop_residual) js["stop_residual"] = *s.stop_residual;
    if (s.label) js["label"] = *s.label;
    solvers.push_back(std::move(js));
  }

  json out = {{"csv", spec.outputs.csv}};
  if (spec.outputs.svg) out["svg"] = *spec.outputs.svg;
  if (spec.outputs.summary) out["summary"] = *spec.outputs.summary;
  if (spec.outputs.model_dir) out["model_dir"] = *spec.outputs.model_dir;

  json j = {{"dataset", ds}, {"loss", loss}, {"regularizer", reg}, {"solvers", solvers},
            {"seeds", spec.seeds}, {"outputs", out}};
  if (spec.sigma2) j["sigma2"] = *spec.sigma2;
  if (spec.init != InitSpec{}) j["init"] = {{"scale", spec.init.scale}, {"seed", spec.init.seed}};
  return j.dump(2) + "\n";
}

void validate_spec(const ExperimentSpec& spec) {
  if (spec.dataset.path.has_value() == spec.dataset.synthetic.has_value()) {
    throw SpecError("dataset: give exactly one of 'path' and 'synthetic'");
  }
  if (spec.dataset.test_fraction && !(*spec.dataset.test_fraction > 0.0 && *spec.dataset.test_fraction < 1.0)) {
    throw SpecError("dataset.test_fraction must lie in (0, 1)");
  }
  if (spec.loss.alpha && !(*spec.loss.alpha > 0.0)) throw SpecError("loss.alpha must be positive");
  if (spec.loss.alpha && spec.loss.kind != LossKind::TruncatedLS) {
    throw SpecError("loss.alpha applies only to the tls loss");
  }
  const auto& r = spec.regularizer;
  if (!(r.lambda >= 0.0)) throw SpecError("regularizer.lambda must be nonnegative");
  if (r.k && r.kind != RegKind::L0BallIndicator) throw SpecError("regularizer.k applies only to l0_ball");
  if (r.k && *r.k < 1) throw SpecError("regularizer.k must be at least 1");
  if (r.kind == RegKind::QuantizationPenalty) {
    named("regularizer", [&] { return Regularizer::quantization(r.lambda, r.grid); });
  } else if (!r.grid.empty()) {
    throw SpecError("regularizer.grid applies only to quantization");
  }
  if (spec.sigma2 && !(*spec.sigma2 >= 0.0)) throw SpecError("sigma2 must be nonnegative");
  if (!(spec.init.scale >= 0.0) || !std::isfinite(spec.init.scale)) {
    throw SpecError("init.scale must be finite and nonnegative");
  }
  if (spec.solvers.empty()) throw SpecError("spec needs at least one solver");
  if (spec.seeds.empty()) throw SpecError("spec needs at least one seed");
  std::set<std::uint64_t> distinct(spec.seeds.begin(), spec.seeds.end());
  if (distinct.size() != spec.seeds.size()) throw SpecError("seeds must be distinct");
  for (std::size_t i = 0; i < spec.solvers.size(); ++i) {
    const auto& s = spec.solvers[i];
    const std::string where = "solvers[" + std::to_string(i) + "]";
    if (s.T.has_value() == s.eps.has_value()) throw SpecError(where + ": give exactly one of 'T' and 'eps'");
    if (s.T && *s.T < 1) throw SpecError(where + ".T must be at least 1");
    if (s.residual_every < 1) throw SpecError(where + ".residual_every must be at least 1");
    if (s.T && !s.schedule && (s.algorithm == Algorithm::MBSPG ||
                               (s.algorithm == Algorithm::SPGR && s.setting == Setting::Online))) {
      throw SpecError(where + ": " + s.display_label() + " with an explicit T needs a schedule");
    }
    if (s.algorithm == Algorithm::HeuristicQSGD && r.kind != RegKind::QuantizationPenalty) {
      throw SpecError(where + ": HeuristicQSGD needs a quantization regularizer");
    }
  }
  if (spec.outputs.csv.empty()) throw SpecError("outputs.csv must be a file name");
}

}  // namespace ncprox::harness
