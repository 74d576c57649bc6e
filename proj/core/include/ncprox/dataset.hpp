#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ncprox/types.hpp"

namespace ncprox {

/// One row of the design matrix: strictly increasing 0-based indices.
struct SparseRow {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  double dot(const Vector& x) const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * x[indices[k]];
    return s;
  }

  /// out += scale * row
  void axpy(double scale, Vector& out) const noexcept {
    for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] += scale * values[k];
  }

  double squared_norm() const noexcept {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }
};

/// Immutable finite-sum sample space: n sparse rows of dimension d plus labels.
class Dataset {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  /// Validates indices (in range, strictly increasing), finiteness, and shape.
  Dataset(std::size_t d, const std::vector<std::vector<Entry>>& rows, std::vector<double> labels);

  std::size_t n() const noexcept { return labels_.size(); }
  std::size_t d() const noexcept { return d_; }

  SparseRow row(std::size_t i) const noexcept {
    const std::size_t b = row_ptr_[i];
    const std::size_t e = row_ptr_[i + 1];
    return {std::span(cols_).subspan(b, e - b), std::span(vals_).subspan(b, e - b)};
  }

  double label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const double> labels() const noexcept { return labels_; }

  std::size_t total_nonzeros() const noexcept { return vals_.size(); }

  /// Rows as entry lists (copies).
  std::vector<std::vector<Entry>> rows() const;

  /// Ground-truth model of a synthetic instance, when known.
  const std::optional<Vector>& planted() const noexcept { return planted_; }
  Dataset with_planted(Vector x) const;

  /// Same features with replaced labels.
  Dataset with_labels(std::vector<double> labels) const;

  /// Rows selected by `idx`, in that order.
  Dataset subset(std::span<const std::size_t> idx) const;

 private:
  Dataset() = default;

  std::size_t d_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  std::vector<double> labels_;
  std::optional<Vector> planted_;
};

}  // namespace ncprox
