#include "ncprox/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ncprox/error.hpp"

namespace ncprox {

std::string_view to_string(Setting s) noexcept {
  return s == Setting::Online ? "online" : "finite_sum";
}

Setting setting_from_string(std::string_view name) {
  if (name == "online") return Setting::Online;
  if (name == "finite_sum") return Setting::FiniteSum;
  throw InvalidParameter("unknown setting '" + std::string(name) + "'");
}

std::string_view to_string(Sampling s) noexcept {
  return s == Sampling::WithReplacement ? "with_replacement" : "without_replacement";
}

Sampling sampling_from_string(std::string_view name) {
  if (name == "with_replacement") return Sampling::WithReplacement;
  if (name == "without_replacement") return Sampling::WithoutReplacement;
  throw InvalidParameter("unknown sampling '" + std::string(name) + "'");
}

std::vector<std::size_t> draw_batch(CounterRng& rng, std::size_t n, std::size_t m, Sampling sampling) {
  if (m < 1) throw InvalidParameter("batch size must be at least 1");
  if (n < 1) throw InvalidParameter("cannot sample from an empty dataset");
  std::vector<std::size_t> idx;
  if (sampling == Sampling::WithReplacement) {
    idx.resize(m);
    for (auto& i : idx) i = rng.uniform_index(n);
  } else {
    if (m > n) throw InvalidParameter("sampling without replacement needs m <= n");
    if (m == n) {
      idx.resize(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      return idx;
    }
    // Partial Fisher-Yates.
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t j = k + rng.uniform_index(n - k);
      std::swap(pool[k], pool[j]);
    }
    idx.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

BatchGrad minibatch_grad(const Objective& obj, const Vector& x, std::size_t m, CounterRng& rng,
                         Sampling sampling, const BatchObserver& observer) {
  const auto idx = draw_batch(rng, obj.n(), m, sampling);
  if (observer) observer(idx);
  return {batch_gradient(obj, x, idx), m};
}

SpgrOnline make_spgr_online(std::size_t s1_size) {
  if (s1_size < 1) throw InvalidParameter("|S1| must be at least 1");
  const auto q = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::sqrt(double(s1_size)))));
  return {s1_size, q, q};
}

SpgrFiniteSum make_spgr_finite_sum(std::size_t n) {
  if (n < 1) throw InvalidParameter("n must be at least 1");
  auto q = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  while (q * q < n) ++q;
  while (q > 1 && (q - 1) * (q - 1) >= n) --q;
  return {q};
}

namespace {
void check_mbspg_c(double c) {
  if (!(c > 0.0 && c < 0.5)) {
    throw InvalidParameter("step fraction c must lie in (0, 1/2) for mini-batch proximal SGD");
  }
}
}  // namespace

double mbspg_c1(double c) {
  check_mbspg_c(c);
  const double k = c * (1.0 - 2.0 * c);
  return (2.0 * k + 2.0) / k;
}

double mbspg_c2(double c) {
  check_mbspg_c(c);
  return (6.0 - 4.0 * c) / (1.0 - 2.0 * c);
}

std::size_t schedule_fixed_batch(double c, double sigma2, double eps) {
  const double c1 = mbspg_c1(c);
  if (!(eps > 0.0)) throw InvalidParameter("target accuracy eps must be positive");
  if (!(sigma2 >= 0.0)) throw InvalidParameter("sigma2 must be nonnegative");
  const double m = std::ceil(2.0 * c1 * sigma2 / (eps * eps));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::size_t schedule_increasing_batch(std::size_t t, std::size_t b) {
  if (b < 1) throw InvalidParameter("increasing batch base b must be at least 1");
  return b * (t + 1);
}

ImbStage spgr_imb_schedule(std::size_t s, std::size_t b) {
  if (s < 1) throw InvalidParameter("stage index s must be at least 1");
  if (b < 1) throw InvalidParameter("stage base b must be at least 1");
  return {b * b * s * s, b * s, b * s};
}

Vector sarah_anchor(const Objective& obj, const Vector& x_t, const AnchorSpec& spec, CounterRng& rng,
                    EstimatorState& state, const BatchObserver& observer) {
  if (spec.q < 1) throw InvalidParameter("epoch length q must be at least 1");
  Vector g;
  if (spec.setting == Setting::FiniteSum) {
    g = full_gradient(obj, x_t);
    state.grad_evals += obj.n();
  } else {
    if (spec.s1_size < 1) throw InvalidParameter("|S1| must be at least 1");
    auto batch = minibatch_grad(obj, x_t, spec.s1_size, rng, spec.sampling, observer);
    g = std::move(batch.g);
    state.grad_evals += batch.evals;
  }
  state.g_prev = g;
  state.x_prev = x_t;
  state.pos_in_epoch = 0;
  state.q = spec.q;
  state.initialized = true;
  return g;
}

Vector sarah_step(const Objective& obj, EstimatorState& state, const Vector& x_t,
                  std::size_t s2_size, CounterRng& rng, Sampling sampling,
                  const BatchObserver& observer) {
  if (!state.initialized) throw ContractViolation("sarah_step before the first anchor");
  if (state.pos_in_epoch + 1 >= state.q) {
    throw ContractViolation("sarah_step called at an epoch boundary; an anchor is required");
  }
  if (x_t.size() != state.x_prev.size()) throw InvalidInput("sarah_step: dimension mismatch");
  const auto idx = draw_batch(rng, obj.n(), s2_size, sampling);
  if (observer) observer(idx);

  // Accumulate sum_i grad f_i(x_t) - grad f_i(x_prev), then average.
  Vector diff = Vector::Zero(x_t.size());
  for (std::size_t i : idx) {
    add_sample_grad(obj, x_t, i, 1.0, diff);
    add_sample_grad(obj, state.x_prev, i, -1.0, diff);
  }
  diff /= static_cast<double>(idx.size());
  Vector g = diff + state.g_prev;

  state.grad_evals += 2 * static_cast<std::uint64_t>(s2_size);
  state.pos_in_epoch += 1;
  state.g_prev = g;
  state.x_prev = x_t;
  return g;
}

}  // namespace ncprox
