#include "ncprox/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "ncprox/error.hpp"
#include "ncprox/rng.hpp"

namespace ncprox {

std::string_view to_string(PlantedKind k) noexcept {
  return k == PlantedKind::Gaussian ? "gaussian" : "sign";
}

PlantedKind planted_kind_from_string(std::string_view name) {
  if (name == "gaussian") return PlantedKind::Gaussian;
  if (name == "sign") return PlantedKind::Sign;
  throw InvalidParameter("unknown planted model kind '" + std::string(name) + "'");
}

namespace {

enum Stream : std::uint64_t { kFeatures = 1, kPlanted = 2, kLabels = 3 };

void validate(const SynthOptions& o) {
  if (o.n < 1 || o.d < 1) throw InvalidParameter("synthetic n and d must be at least 1");
  if (o.row_nnz < 1 || o.row_nnz > o.d) throw InvalidParameter("row_nnz must lie in [1, d]");
  if (o.planted_nnz > o.d) throw InvalidParameter("planted_nnz must not exceed d");
  if (!(o.noise >= 0.0) || !std::isfinite(o.noise)) throw InvalidParameter("noise must be >= 0");
  if (!(o.outlier_fraction >= 0.0 && o.outlier_fraction <= 1.0)) {
    throw InvalidParameter("outlier_fraction must lie in [0, 1]");
  }
}

// k distinct sorted indices from [0, d).
std::vector<std::uint32_t> random_support(CounterRng& rng, std::size_t d, std::size_t k,
                                          std::vector<std::uint32_t>& pool) {
  pool.resize(d);
  std::iota(pool.begin(), pool.end(), std::uint32_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.uniform_index(d - i)]);
  }
  std::vector<std::uint32_t> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

struct Design {
  std::vector<std::vector<Dataset::Entry>> rows;
  Vector planted;
  std::vector<double> margins;
};

Design draw_design(const SynthOptions& o) {
  const CounterRng root(o.seed);
  CounterRng feat = root.split(kFeatures);
  CounterRng plant = root.split(kPlanted);
  std::vector<std::uint32_t> pool;

  Design out;
  const std::size_t k = o.planted_nnz == 0 ? (o.d + 4) / 5 : o.planted_nnz;
  out.planted = Vector::Zero(static_cast<Eigen::Index>(o.d));
  for (std::uint32_t j : random_support(plant, o.d, k, pool)) {
    out.planted[j] = o.planted == PlantedKind::Sign ? (plant.uniform01() < 0.5 ? -1.0 : 1.0)
                                                    : plant.normal();
  }

  out.rows.resize(o.n);
  out.margins.resize(o.n);
  for (std::size_t i = 0; i < o.n; ++i) {
    double z = 0.0;
    for (std::uint32_t j : random_support(feat, o.d, o.row_nnz, pool)) {
      const double v = feat.normal();
      out.rows[i].emplace_back(j, v);
      z += v * out.planted[j];
    }
    out.margins[i] = z;
  }
  return out;
}

}  // namespace

Dataset synth_classification(const SynthOptions& opts) {
  validate(opts);
  Design design = draw_design(opts);
  CounterRng noise = CounterRng(opts.seed).split(kLabels);
  std::vector<double> labels(opts.n);
  for (std::size_t i = 0; i < opts.n; ++i) {
    const double s = 1.0 / (1.0 + std::exp(-design.margins[i]));
    const double z = opts.noise > 0.0 ? noise.normal() : 0.0;
    labels[i] = s + opts.noise * z > 0.5 ? 1.0 : 0.0;
  }
  return Dataset(opts.d, design.rows, std::move(labels)).with_planted(std::move(design.planted));
}

Dataset synth_regression(const SynthOptions& opts) {
  validate(opts);
  Design design = draw_design(opts);
  CounterRng noise = CounterRng(opts.seed).split(kLabels);
  std::vector<double> labels(opts.n);
  for (std::size_t i = 0; i < opts.n; ++i) {
    double y = design.margins[i];
    if (opts.noise > 0.0) y += opts.noise * noise.normal();
    if (opts.outlier_fraction > 0.0 && noise.uniform01() < opts.outlier_fraction) {
      // Standard Cauchy via the tangent of a uniform angle.
      const double u = noise.uniform01();
      y = design.margins[i] + opts.outlier_scale * std::tan(std::numbers::pi * (u - 0.5));
    }
    labels[i] = y;
  }
  return Dataset(opts.d, design.rows, std::move(labels)).with_planted(std::move(design.planted));
}

}  // namespace ncprox
