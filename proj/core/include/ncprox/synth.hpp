#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "ncprox/dataset.hpp"

namespace ncprox {

enum class PlantedKind {
  Gaussian,  ///< standard normal entries on a random support
  Sign,      ///< +-1 entries on a random support
};

std::string_view to_string(PlantedKind k) noexcept;
PlantedKind planted_kind_from_string(std::string_view name);

struct SynthOptions {
  std::size_t n = 100;
  std::size_t d = 10;
  std::size_t row_nnz = 5;          ///< nonzero features per row
  std::size_t planted_nnz = 0;      ///< support of x*; 0 means ceil(d / 5)
  PlantedKind planted = PlantedKind::Gaussian;
  double noise = 0.0;
  double outlier_fraction = 0.0;    ///< regression only: share of heavy-tailed labels
  double outlier_scale = 10.0;
  std::uint64_t seed = 0;

  bool operator==(const SynthOptions&) const = default;
};

/// Labels b_i = 1{sigmoid(x*.a_i) + noise z_i > 1/2}. x* is stored as the
/// planted model.
Dataset synth_classification(const SynthOptions& opts);

/// Labels y_i = x*.a_i + noise z_i, with outlier_fraction of them replaced by
/// x*.a_i + outlier_scale * (standard Cauchy draw).
Dataset synth_regression(const SynthOptions& opts);

}  // namespace ncprox
