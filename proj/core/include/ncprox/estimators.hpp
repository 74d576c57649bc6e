#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "ncprox/model.hpp"
#include "ncprox/rng.hpp"
#include "ncprox/types.hpp"

namespace ncprox {

enum class Setting { Online, FiniteSum };
enum class Sampling { WithReplacement, WithoutReplacement };

std::string_view to_string(Setting s) noexcept;
Setting setting_from_string(std::string_view name);
std::string_view to_string(Sampling s) noexcept;
Sampling sampling_from_string(std::string_view name);

/// Called with the (sorted) sample indices of every drawn batch.
using BatchObserver = std::function<void(std::span<const std::size_t>)>;

/// Draws m sample indices from [0, n) and sorts them ascending. Without
/// replacement requires m <= n.
std::vector<std::size_t> draw_batch(CounterRng& rng, std::size_t n, std::size_t m, Sampling sampling);

struct BatchGrad {
  Vector g;
  std::uint64_t evals;
};

/// Uniform mini-batch gradient estimate; E[g] = grad f(x).
BatchGrad minibatch_grad(const Objective& obj, const Vector& x, std::size_t m, CounterRng& rng,
                         Sampling sampling = Sampling::WithReplacement,
                         const BatchObserver& observer = {});

// ---- batch-size schedules -------------------------------------------------

struct FixedBatch {
  std::size_t m;
  bool operator==(const FixedBatch&) const = default;
};
struct IncreasingBatch {
  std::size_t b;
  bool operator==(const IncreasingBatch&) const = default;
};
struct SpgrOnline {
  std::size_t s1_size;
  std::size_t s2_size;
  std::size_t q;
  bool operator==(const SpgrOnline&) const = default;
};
struct SpgrFiniteSum {
  std::size_t q;  ///< epoch length, equal to |S2|; anchors use all n samples
  bool operator==(const SpgrFiniteSum&) const = default;
};
struct SpgrImb {
  std::size_t b;
  bool operator==(const SpgrImb&) const = default;
};

using BatchSchedule = std::variant<FixedBatch, IncreasingBatch, SpgrOnline, SpgrFiniteSum, SpgrImb>;

/// q = |S2| = round(sqrt(|S1|)), at least 1.
SpgrOnline make_spgr_online(std::size_t s1_size);
/// q = |S2| = ceil(sqrt(n)).
SpgrFiniteSum make_spgr_finite_sum(std::size_t n);

/// c1 = (2c(1-2c) + 2) / (c(1-2c)); requires 0 < c < 1/2.
double mbspg_c1(double c);
/// c2 = (6 - 4c) / (1 - 2c); requires 0 < c < 1/2.
double mbspg_c2(double c);

/// Fixed mini-batch m = ceil(2 c1 sigma^2 / eps^2), at least 1.
std::size_t schedule_fixed_batch(double c, double sigma2, double eps);

/// m_t = b (t + 1).
std::size_t schedule_increasing_batch(std::size_t t, std::size_t b);

struct ImbStage {
  std::size_t s1_size;    ///< b^2 s^2
  std::size_t s2_size;    ///< b s
  std::size_t inner_len;  ///< b s
  bool operator==(const ImbStage&) const = default;
};

/// Sizes for stage s >= 1 of the increasing-batch recursive method.
ImbStage spgr_imb_schedule(std::size_t s, std::size_t b);

// ---- SARAH / SPIDER recursion ----------------------------------------------

struct EstimatorState {
  Vector g_prev;
  Vector x_prev;
  std::size_t pos_in_epoch = 0;
  std::size_t q = 1;
  std::uint64_t grad_evals = 0;
  bool initialized = false;
};

struct AnchorSpec {
  Setting setting = Setting::FiniteSum;
  std::size_t s1_size = 0;  ///< ignored in the finite-sum setting
  std::size_t q = 1;        ///< epoch length following this anchor
  Sampling sampling = Sampling::WithReplacement;
};

/// Starts an epoch: g_t is the full gradient (finite-sum, n evaluations) or a
/// |S1| mini-batch estimate (online). Resets the state to position 0.
Vector sarah_anchor(const Objective& obj, const Vector& x_t, const AnchorSpec& spec, CounterRng& rng,
                    EstimatorState& state, const BatchObserver& observer = {});

/// g_t = grad f_S2(x_t) - grad f_S2(x_{t-1}) + g_{t-1}, with one batch S2
/// shared by both points. Costs 2|S2| evaluations. Throws ContractViolation
/// if the state is uninitialised or the next position would reach q.
Vector sarah_step(const Objective& obj, EstimatorState& state, const Vector& x_t,
                  std::size_t s2_size, CounterRng& rng,
                  Sampling sampling = Sampling::WithReplacement,
                  const BatchObserver& observer = {});

}  // namespace ncprox
