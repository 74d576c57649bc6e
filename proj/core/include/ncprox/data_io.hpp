#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ncprox/dataset.hpp"

namespace ncprox {

/// One libsvm line as written in the file (1-based feature indices).
struct RawRecord {
  double label = 0.0;
  std::vector<std::pair<std::uint64_t, double>> features;
};

/// Parses one "label idx:val idx:val ..." line. Throws ParseError tagged with
/// `line_no` on malformed tokens, index < 1, or non-increasing indices.
RawRecord parse_libsvm_line(std::string_view line, std::size_t line_no);

/// Reads a libsvm stream. Blank lines and lines starting with '#' are
/// skipped. d is the largest index seen unless `d_override` is given, in which
/// case an index beyond it is an error.
Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> d_override = std::nullopt);

/// Writes 1-based libsvm lines with round-trip precision.
void emit_libsvm(std::ostream& out, const Dataset& data);

/// Maps a two-valued label set to {0, 1}: {0,1} unchanged, {-1,+1} with
/// -1 -> 0, any other pair smaller -> 0 and larger -> 1. More than two
/// distinct labels is rejected as multiclass.
Dataset binarize_labels(const Dataset& data);

/// Seeded permutation split; the train part gets round(fraction * n) samples,
/// clamped so both parts are nonempty. Requires n >= 2 and 0 < fraction < 1.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double fraction, std::uint64_t seed);

enum class NormalizeMode { None, UnitRowNorm };

std::string_view to_string(NormalizeMode m) noexcept;
NormalizeMode normalize_mode_from_string(std::string_view name);

/// UnitRowNorm divides each nonzero row by its Euclidean norm.
Dataset normalize_features(const Dataset& data, NormalizeMode mode);

}  // namespace ncprox
