#include "ncprox/harness/quant.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>

#include "ncprox/data_io.hpp"
#include "ncprox/error.hpp"
#include "ncprox/harness/runner.hpp"
#include "ncprox/regularizer.hpp"

namespace ncprox::harness {

Vector read_model_vector(std::istream& in) {
  std::vector<double> vals;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos >= line.size() || line[pos] == '#') break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end || !std::isfinite(v)) {
        throw ParseError(line_no, "bad model entry '" + line.substr(pos, end - pos) + "'");
      }
      vals.push_back(v);
      pos = end;
    }
  }
  if (vals.empty()) throw InvalidInput("model file has no entries");
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

QuantReport evaluate_quantized(const Vector& model, const std::vector<double>& grid, const Dataset& test) {
  if (static_cast<std::size_t>(model.size()) != test.d()) {
    throw InvalidInput("dimension mismatch: model has " + std::to_string(model.size()) + " entries, test set has d=" +
                       std::to_string(test.d()));
  }
  if (grid.empty()) throw InvalidParameter("grid must be nonempty");
  QuantReport r;
  r.dim = test.d();
  r.test_samples = test.n();
  r.projected = project_to_grid(grid, model);
  r.accuracy = classification_accuracy(r.projected, test);
  r.correct = static_cast<std::size_t>(std::llround(r.accuracy * static_cast<double>(test.n())));
  return r;
}

Dataset load_quant_test_set(std::istream& in, std::size_t dim) {
  Dataset raw = parse_libsvm(in);
  if (raw.d() > dim) {
    throw InvalidInput("dimension mismatch: test set uses feature " + std::to_string(raw.d()) +
                       " but the model has " + std::to_string(dim) + " entries");
  }
  std::vector<double> labels(raw.labels().begin(), raw.labels().end());
  return binarize_labels(Dataset(dim, raw.rows(), std::move(labels)));
}

}  // namespace ncprox::harness
