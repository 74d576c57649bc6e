#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "ncprox/dataset.hpp"
#include "ncprox/model.hpp"
#include "ncprox/rng.hpp"
#include "ncprox/synth.hpp"

namespace ncprox::tsupport {

// Dense rows to a Dataset, dropping exact zeros.
inline Dataset dense_dataset(const std::vector<std::vector<double>>& rows, std::vector<double> labels) {
  std::vector<std::vector<Dataset::Entry>> sparse;
  std::size_t d = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    std::vector<Dataset::Entry> e;
    for (std::size_t j = 0; j < r.size(); ++j)
      if (r[j] != 0.0) e.emplace_back(static_cast<std::uint32_t>(j), r[j]);
    sparse.push_back(std::move(e));
  }
  return Dataset(d, sparse, std::move(labels));
}

inline std::shared_ptr<const Dataset> share(Dataset d) {
  return std::make_shared<const Dataset>(std::move(d));
}

// Random dense dataset with Gaussian features; binary labels when `binary`.
inline Dataset random_dataset(std::size_t n, std::size_t d, bool binary, CounterRng& rng) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : rows[i]) v = rng.normal();
    labels[i] = binary ? static_cast<double>(rng.uniform_index(2)) : rng.normal();
  }
  return dense_dataset(rows, labels);
}

inline Vector random_vector(std::size_t d, CounterRng& rng, double scale = 1.0) {
  Vector x(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = scale * rng.normal();
  return x;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Per-sample loss written out directly from the model definitions, independent
// of the library's link evaluation.
inline double reference_sample_loss(const SmoothLoss& loss, const Dataset& data, const Vector& x,
                                    std::size_t i) {
  double z = 0.0;
  const auto row = data.row(i);
  for (std::size_t k = 0; k < row.indices.size(); ++k) z += row.values[k] * x[row.indices[k]];
  const double y = data.label(i);
  switch (loss.kind) {
    case LossKind::NllsSigmoid: {
      const double r = y - sigmoid(z);
      return r * r;
    }
    case LossKind::TruncatedLS:
      return loss.alpha / 2.0 * std::log(1.0 + (y - z) * (y - z) / loss.alpha);
    case LossKind::LeastSquares: return 0.5 * (y - z) * (y - z);
  }
  return 0.0;
}

inline double reference_full_loss(const SmoothLoss& loss, const Dataset& data, const Vector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) s += reference_sample_loss(loss, data, x, i);
  return s / static_cast<double>(data.n());
}

// Central differences with per-coordinate step h * max(1, |x_j|).
template <class F>
Vector central_diff(F&& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = h * std::max(1.0, std::abs(x[j]));
    Vector xp = x, xm = x;
    xp[j] += step;
    xm[j] -= step;
    g[j] = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

// Mean and standard error of a sample.
struct MeanSe {
  double mean;
  double se;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m += a;
  m /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v) ss += (a - m) * (a - m);
  const double var = v.size() > 1 ? ss / static_cast<double>(v.size() - 1) : 0.0;
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace ncprox::tsupport
