#include "ncprox/dataset.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ncprox/error.hpp"

namespace ncprox {

Dataset::Dataset(std::size_t d, const std::vector<std::vector<Entry>>& rows,
                 std::vector<double> labels)
    : d_(d), labels_(std::move(labels)) {
  if (rows.empty()) throw InvalidInput("dataset must contain at least one sample");
  if (d_ < 1) throw InvalidInput("dataset dimension must be at least 1");
  if (d_ > std::numeric_limits<std::uint32_t>::max()) throw InvalidInput("dataset dimension too large");
  if (labels_.size() != rows.size()) throw InvalidInput("labels length must equal sample count");

  row_ptr_.reserve(rows.size() + 1);
  row_ptr_.push_back(0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!std::isfinite(labels_[i])) {
      throw InvalidInput("non-finite label in sample " + std::to_string(i));
    }
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      const auto [idx, val] = rows[i][k];
      if (idx >= d_) {
        throw InvalidInput("feature index " + std::to_string(idx) + " out of range in sample " +
                           std::to_string(i));
      }
      if (k > 0 && rows[i][k - 1].first >= idx) {
        throw InvalidInput("feature indices not strictly increasing in sample " + std::to_string(i));
      }
      if (!std::isfinite(val)) {
        throw InvalidInput("non-finite feature value in sample " + std::to_string(i));
      }
      cols_.push_back(idx);
      vals_.push_back(val);
    }
    row_ptr_.push_back(cols_.size());
  }
}

std::vector<std::vector<Dataset::Entry>> Dataset::rows() const {
  std::vector<std::vector<Entry>> out(n());
  for (std::size_t i = 0; i < n(); ++i) {
    const SparseRow r = row(i);
    out[i].reserve(r.indices.size());
    for (std::size_t k = 0; k < r.indices.size(); ++k) out[i].emplace_back(r.indices[k], r.values[k]);
  }
  return out;
}

Dataset Dataset::with_planted(Vector x) const {
  if (static_cast<std::size_t>(x.size()) != d_) throw InvalidInput("planted model dimension mismatch");
  Dataset out = *this;
  out.planted_ = std::move(x);
  return out;
}

Dataset Dataset::with_labels(std::vector<double> labels) const {
  if (labels.size() != n()) throw InvalidInput("labels length must equal sample count");
  for (double b : labels) {
    if (!std::isfinite(b)) throw InvalidInput("non-finite label");
  }
  Dataset out = *this;
  out.labels_ = std::move(labels);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  if (idx.empty()) throw InvalidInput("subset must select at least one sample");
  Dataset out;
  out.d_ = d_;
  out.planted_ = planted_;
  out.row_ptr_.reserve(idx.size() + 1);
  out.row_ptr_.push_back(0);
  for (std::size_t i : idx) {
    if (i >= n()) throw IndexOutOfRange("subset index " + std::to_string(i) + " out of range");
    const SparseRow r = row(i);
    out.cols_.insert(out.cols_.end(), r.indices.begin(), r.indices.end());
    out.vals_.insert(out.vals_.end(), r.values.begin(), r.values.end());
    out.row_ptr_.push_back(out.cols_.size());
    out.labels_.push_back(labels_[i]);
  }
  return out;
}

}  // namespace ncprox
