#include "ncprox/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <string>

#include "ncprox/error.hpp"
#include "ncprox/rng.hpp"

namespace ncprox {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

double parse_double(std::string_view tok, std::size_t line_no, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(line_no, std::string("malformed ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

RawRecord parse_libsvm_line(std::string_view line, std::size_t line_no) {
  RawRecord rec;
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !is_space(line[pos])) ++pos;
    return line.substr(start, pos - start);
  };

  const std::string_view label_tok = next_token();
  if (label_tok.empty()) throw ParseError(line_no, "missing label");
  rec.label = parse_double(label_tok, line_no, "label");

  for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
    if (tok.front() == '#') break;
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) {
      throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
    }
    const std::string_view idx_tok = tok.substr(0, colon);
    std::uint64_t idx = 0;
    auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
    if (idx_tok.empty() || ec != std::errc() || ptr != idx_tok.data() + idx_tok.size()) {
      throw ParseError(line_no, "malformed feature index '" + std::string(idx_tok) + "'");
    }
    if (idx < 1) throw ParseError(line_no, "feature index must be >= 1");
    if (!rec.features.empty() && rec.features.back().first >= idx) {
      throw ParseError(line_no, "feature indices must be strictly increasing");
    }
    rec.features.emplace_back(idx, parse_double(tok.substr(colon + 1), line_no, "feature value"));
  }
  return rec;
}

Dataset parse_libsvm(std::istream& in, std::optional<std::size_t> d_override) {
  std::vector<std::vector<Dataset::Entry>> rows;
  std::vector<double> labels;
  std::uint64_t max_idx = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    RawRecord rec = parse_libsvm_line(line, line_no);
    std::vector<Dataset::Entry> row;
    row.reserve(rec.features.size());
    for (const auto& [idx, val] : rec.features) {
      if (d_override && idx > *d_override) {
        throw ParseError(line_no, "feature index " + std::to_string(idx) + " exceeds dimension " +
                                      std::to_string(*d_override));
      }
      if (idx > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError(line_no, "feature index too large");
      }
      max_idx = std::max(max_idx, idx);
      row.emplace_back(static_cast<std::uint32_t>(idx - 1), val);
    }
    rows.push_back(std::move(row));
    labels.push_back(rec.label);
  }
  if (rows.empty()) throw InvalidInput("no records");
  const std::size_t d = d_override ? *d_override : std::max<std::size_t>(1, max_idx);
  return Dataset(d, rows, std::move(labels));
}

void emit_libsvm(std::ostream& out, const Dataset& data) {
  for (std::size_t i = 0; i < data.n(); ++i) {
    out << format_double(data.label(i));
    const SparseRow row = data.row(i);
    for (std::size_t k = 0; k < row.indices.size(); ++k) {
      out << ' ' << (row.indices[k] + 1) << ':' << format_double(row.values[k]);
    }
    out << '\n';
  }
}

Dataset binarize_labels(const Dataset& data) {
  std::set<double> distinct(data.labels().begin(), data.labels().end());
  if (distinct.size() > 2) {
    throw InvalidInput("multiclass labels (" + std::to_string(distinct.size()) +
                       " distinct values) are not supported");
  }
  const bool already01 = std::all_of(distinct.begin(), distinct.end(),
                                     [](double v) { return v == 0.0 || v == 1.0; });
  if (already01) return data;
  const bool signed_labels = std::all_of(distinct.begin(), distinct.end(),
                                         [](double v) { return v == -1.0 || v == 0.0 || v == 1.0; });
  // {-1,+1}-style labels map by sign; any other pair maps smaller -> 0.
  const double neg = (signed_labels || distinct.size() == 1) ? 0.0 : *distinct.begin();
  std::vector<double> mapped(data.n());
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double v = data.label(i);
    mapped[i] = (signed_labels || distinct.size() == 1) ? (v > neg ? 1.0 : 0.0) : (v == neg ? 0.0 : 1.0);
  }
  return data.with_labels(std::move(mapped));
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double fraction, std::uint64_t seed) {
  if (data.n() < 2) throw InvalidParameter("train_test_split needs at least two samples");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidParameter("split fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> perm(data.n());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng rng(seed, 0x73706c6974);
  for (std::size_t i = perm.size() - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
  }
  auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(data.n())));
  n_train = std::clamp<std::size_t>(n_train, 1, data.n() - 1);
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.subset(train), data.subset(test)};
}

std::string_view to_string(NormalizeMode m) noexcept {
  return m == NormalizeMode::None ? "none" : "unit_row_norm";
}

NormalizeMode normalize_mode_from_string(std::string_view name) {
  if (name == "none") return NormalizeMode::None;
  if (name == "unit_row_norm") return NormalizeMode::UnitRowNorm;
  throw InvalidParameter("unknown normalization '" + std::string(name) + "'");
}

Dataset normalize_features(const Dataset& data, NormalizeMode mode) {
  if (mode == NormalizeMode::None) return data;
  auto rows = data.rows();
  for (auto& row : rows) {
    double sq = 0.0;
    for (const auto& e : row) sq += e.second * e.second;
    if (sq == 0.0) continue;
    const double norm = std::sqrt(sq);
    for (auto& e : row) e.second /= norm;
  }
  Dataset out(data.d(), rows, std::vector<double>(data.labels().begin(), data.labels().end()));
  if (data.planted()) out = out.with_planted(*data.planted());
  return out;
}

}  // namespace ncprox
