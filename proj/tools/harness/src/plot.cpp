#include "ncprox/harness/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <sstream>

#include "ncprox/error.hpp"
#include "ncprox/harness/runner.hpp"

namespace ncprox::harness {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view tok, std::size_t line_no, const char* column) {
  T v{};
  if (tok == "nan" || tok == "inf" || tok == "-inf") {
    if constexpr (std::is_floating_point_v<T>) {
      return tok == "nan" ? std::numeric_limits<T>::quiet_NaN()
                          : (tok == "inf" ? std::numeric_limits<T>::infinity() : -std::numeric_limits<T>::infinity());
    }
  }
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, std::string("bad value '") + std::string(tok) + "' in column " + column);
  }
  return v;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e5 || std::abs(v) < 1e-3)) {
    std::snprintf(buf, sizeof(buf), "%.0e", v);
  } else {
    std::snprintf(buf, sizeof(buf), "%g", v);
  }
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

}  // namespace

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw InvalidInput("unexpected CSV columns '" + line + "' (expected '" + kCsvHeader + "')");
  }
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 9) throw ParseError(line_no, "expected 9 columns, found " + std::to_string(f.size()));
    TraceRow r;
    r.run_id = parse_field<std::uint64_t>(f[0], line_no, "run_id");
    r.algorithm = std::string(f[1]);
    r.seed = parse_field<std::uint64_t>(f[2], line_no, "seed");
    r.t = parse_field<std::uint64_t>(f[3], line_no, "t");
    r.grad_evals = parse_field<std::uint64_t>(f[4], line_no, "grad_evals");
    r.F = parse_field<double>(f[5], line_no, "F");
    if (!f[6].empty()) r.exact_residual = parse_field<double>(f[6], line_no, "exact_residual");
    r.nnz = parse_field<std::uint64_t>(f[7], line_no, "nnz");
    r.wall_ms = parse_field<double>(f[8], line_no, "wall_ms");
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw InvalidInput("CSV has no data rows");
  return rows;
}

XAxis x_axis_from_string(std::string_view name) {
  if (name == "grad_evals") return XAxis::GradEvals;
  if (name == "t") return XAxis::Iteration;
  throw InvalidParameter("unknown x axis '" + std::string(name) + "' (expected grad_evals or t)");
}

YAxis y_axis_from_string(std::string_view name) {
  if (name == "F") return YAxis::Objective;
  if (name == "exact_residual") return YAxis::Residual;
  throw InvalidParameter("unknown y axis '" + std::string(name) + "' (expected F or exact_residual)");
}

std::string render_svg(const std::vector<TraceRow>& rows, const PlotOptions& opt) {
  if (rows.empty()) throw InvalidInput("nothing to plot");

  // label -> run_id -> points in file order
  std::vector<std::string> labels;
  std::map<std::string, std::map<std::uint64_t, std::vector<std::pair<double, double>>>> runs;
  for (const auto& r : rows) {
    if (!runs.count(r.algorithm)) labels.push_back(r.algorithm);
    auto& pts = runs[r.algorithm][r.run_id];
    std::optional<double> y = opt.y == YAxis::Objective ? std::optional<double>(r.F) : r.exact_residual;
    if (!y || !std::isfinite(*y)) continue;
    const double x = opt.x == XAxis::GradEvals ? static_cast<double>(r.grad_evals) : static_cast<double>(r.t);
    pts.emplace_back(x, *y);
  }

  bool clamped = false;
  struct Series {
    std::string label;
    std::vector<std::pair<double, double>> pts;
  };
  std::vector<Series> series;
  for (const auto& label : labels) {
    std::size_t len = std::numeric_limits<std::size_t>::max();
    for (const auto& [id, pts] : runs[label]) len = std::min(len, pts.size());
    Series s{label, {}};
    for (std::size_t k = 0; k < len; ++k) {
      std::vector<double> xs, ys;
      for (const auto& [id, pts] : runs[label]) {
        xs.push_back(pts[k].first);
        ys.push_back(pts[k].second);
      }
      double y = median_of(ys);
      if (opt.log_y && y < kLogFloor) {
        y = kLogFloor;
        clamped = true;
      }
      s.pts.emplace_back(median_of(xs), y);
    }
    series.push_back(std::move(s));
  }

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series)
    for (const auto& [x, y] : s.pts) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      const double yy = opt.log_y ? std::log10(y) : y;
      y_lo = std::min(y_lo, yy);
      y_hi = std::max(y_hi, yy);
    }
  if (!std::isfinite(x_lo)) {
    x_lo = 0;
    x_hi = 1;
    y_lo = 0;
    y_hi = 1;
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1;
  if (y_hi <= y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }
  if (opt.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
  }

  const double W = 720, H = 480, left = 80, right = 200, top = 40, bottom = 70;
  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) {
    const double v = opt.log_y ? std::log10(y) : y;
    return top + (1.0 - (v - y_lo) / (y_hi - y_lo)) * ph;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    svg << "<text class=\"title\" x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(opt.title) << "</text>\n";
  }
  svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
      << fmt(top + ph) << "\"/>\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
      << fmt(top + ph) << "\"/>\n</g>\n";

  svg << "<g class=\"ticks\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double x = x_lo + (x_hi - x_lo) * k / 5.0;
    svg << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">"
        << tick_label(x) << "</text>\n";
  }
  if (opt.log_y) {
    const int step = std::max(1, static_cast<int>(std::ceil((y_hi - y_lo) / 8.0)));
    for (int e = static_cast<int>(y_lo); e <= static_cast<int>(y_hi); e += step) {
      svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(sy(std::pow(10.0, e)) + 4)
          << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
  } else {
    for (int k = 0; k <= 5; ++k) {
      const double y = y_lo + (y_hi - y_lo) * k / 5.0;
      svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(sy(y) + 4) << "\" text-anchor=\"end\">"
          << tick_label(y) << "</text>\n";
    }
  }
  svg << "</g>\n";

  const char* x_name = opt.x == XAxis::GradEvals ? "gradient evaluations" : "iteration t";
  std::string y_name = opt.y == YAxis::Objective ? "objective F" : "stationarity residual";
  if (opt.log_y) y_name += " (log scale)";
  svg << "<text class=\"xlabel\" x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 30)
      << "\" text-anchor=\"middle\">" << x_name << "</text>\n";
  svg << "<text class=\"ylabel\" x=\"20\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << fmt(top + ph / 2) << ")\">" << escape(y_name) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const bool online = s.label.size() >= 7 && s.label.compare(s.label.size() - 7, 7, "-online") == 0;
    const char* color = kPalette[i % std::size(kPalette)];
    svg << "<polyline class=\"series\" data-label=\"" << escape(s.label) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"" << (online ? "" : " stroke-dasharray=\"6 4\"") << " points=\"";
    for (std::size_t k = 0; k < s.pts.size(); ++k) {
      if (k) svg << ' ';
      svg << fmt(sx(s.pts[k].first)) << ',' << fmt(sy(s.pts[k].second));
    }
    svg << "\"/>\n";
  }

  svg << "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const bool online = s.label.size() >= 7 && s.label.compare(s.label.size() - 7, 7, "-online") == 0;
    const double y = top + 10 + 20.0 * static_cast<double>(i);
    const double x = left + pw + 16;
    svg << "<g class=\"legend-entry\"><line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 28)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"" << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"1.5\""
        << (online ? "" : " stroke-dasharray=\"6 4\"") << "/><text x=\"" << fmt(x + 34) << "\" y=\"" << fmt(y + 4)
        << "\">" << escape(s.label) << "</text></g>\n";
  }
  svg << "</g>\n";

  if (clamped) {
    svg << "<text class=\"footnote\" x=\"" << fmt(left) << "\" y=\"" << fmt(H - 8)
        << "\" font-size=\"10\">* values below 1e-16 drawn at the plot floor 1e-16</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace ncprox::harness
