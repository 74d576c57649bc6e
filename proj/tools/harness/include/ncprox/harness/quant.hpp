#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ncprox/dataset.hpp"
#include "ncprox/types.hpp"

namespace ncprox::harness {

/// Reads a model vector: whitespace- or comma-separated numbers.
Vector read_model_vector(std::istream& in);

struct QuantReport {
  std::size_t dim = 0;
  std::size_t test_samples = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  Vector projected;
};

/// Projects `model` onto `grid` coordinatewise and scores it on `test`
/// (labels in {0,1}). Throws InvalidInput on a dimension mismatch.
QuantReport evaluate_quantized(const Vector& model, const std::vector<double>& grid, const Dataset& test);

/// Parses a libsvm test set for a model of dimension `dim` and binarizes the
/// labels. Feature indices beyond `dim` are a dimension mismatch.
Dataset load_quant_test_set(std::istream& in, std::size_t dim);

}  // namespace ncprox::harness
