#include "cmasim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "cmasim/csv.hpp"
#include "cmasim/errors.hpp"

namespace cmasim {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 70.0;
constexpr int kTicks = 5;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

std::string text_of(const ReportValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  return csv::format_number(std::get<double>(v));
}

double number_of(const ExperimentReport& r, const ReportValue& v, const std::string& col) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw InputError("svg: column '" + col + "' of report " + r.id + " is not numeric");
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range padded(double lo, double hi, bool include_zero) {
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (hi - lo <= 0.0) {
    hi = lo + (lo == 0.0 ? 1.0 : std::abs(lo) * 0.1);
  } else if (include_zero) {
    hi += 0.05 * (hi - lo);
  }
  return {lo, hi};
}

struct Frame {
  Range x;
  Range y;
  double px(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom); }
};

void axes(std::string& out, const Frame& f, const std::string& xlabel, const std::string& ylabel,
          bool x_ticks) {
  const double x0 = kLeft;
  const double x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom;
  const double y1 = kTop;
  out += "<g stroke=\"#000\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) + "\" y2=\"" + fmt(y0) + "\"/>\n";
  out += "<line x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(y1) + "\"/>\n";
  out += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#000\">\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double v = f.y.lo + (f.y.hi - f.y.lo) * i / kTicks;
    const double y = f.py(v);
    out += "<line x1=\"" + fmt(x0 - 4) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(x0) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#000\"/>\n";
    out += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
           csv::format_number(std::round(v * 1e4) / 1e4) + "</text>\n";
  }
  if (x_ticks) {
    for (int i = 0; i <= kTicks; ++i) {
      const double v = f.x.lo + (f.x.hi - f.x.lo) * i / kTicks;
      const double x = f.px(v);
      out += "<line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x) + "\" y2=\"" + fmt(y0 + 4) +
             "\" stroke=\"#000\"/>\n";
      out += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y0 + 16) + "\" text-anchor=\"middle\">" +
             csv::format_number(std::round(v * 1e4) / 1e4) + "</text>\n";
    }
  }
  out += "<text x=\"" + fmt((x0 + x1) / 2) + "\" y=\"" + fmt(kHeight - 20) + "\" text-anchor=\"middle\">" +
         escape(xlabel) + "</text>\n";
  out += "<text x=\"18\" y=\"" + fmt((y0 + y1) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt((y0 + y1) / 2) + ")\">" + escape(ylabel) + "</text>\n";
  out += "</g>\n";
}

std::string header(const ExperimentReport& r) {
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
      "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\" "
         "text-anchor=\"middle\">" + escape(r.id) + "</text>\n";
  return out;
}

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string line_chart(const ExperimentReport& r) {
  const auto xi = r.column(r.chart.x);
  std::vector<Series> series;
  if (!r.chart.group.empty()) {
    const auto gi = r.column(r.chart.group);
    const auto yi = r.column(r.chart.y.at(0));
    std::map<std::string, std::size_t> index;
    for (const auto& row : r.rows) {
      const auto name = text_of(row[gi]);
      auto [it, fresh] = index.try_emplace(name, series.size());
      if (fresh) series.push_back({name, {}});
      series[it->second].points.emplace_back(number_of(r, row[xi], r.chart.x),
                                             number_of(r, row[yi], r.chart.y[0]));
    }
  } else {
    for (const auto& y : r.chart.y) {
      const auto yi = r.column(y);
      Series s{y, {}};
      for (const auto& row : r.rows) {
        s.points.emplace_back(number_of(r, row[xi], r.chart.x), number_of(r, row[yi], y));
      }
      series.push_back(std::move(s));
    }
  }

  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  const Frame f{padded(xlo, xhi, false), padded(ylo, yhi, true)};

  std::string out = header(r);
  std::string ylabel = r.chart.group.empty() ? std::string() : r.chart.y[0];
  axes(out, f, r.chart.x, ylabel, true);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (auto [x, y] : series[k].points) {
      if (!pts.empty()) pts += ' ';
      pts += fmt(f.px(x)) + "," + fmt(f.py(y));
    }
    out += "<g class=\"series\" data-name=\"" + escape(series[k].name) + "\">\n";
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    for (auto [x, y] : series[k].points) {
      out += "<circle cx=\"" + fmt(f.px(x)) + "\" cy=\"" + fmt(f.py(y)) + "\" r=\"2.5\" fill=\"" + colour + "\"/>\n";
    }
    out += "</g>\n";
    const double ly = kTop + 16.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 15;
    out += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 18) + "\" y2=\"" + fmt(ly) +
           "\" stroke=\"" + colour + "\" stroke-width=\"3\"/>\n";
    out += "<text x=\"" + fmt(lx + 24) + "\" y=\"" + fmt(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[k].name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const ExperimentReport& r) {
  const auto xi = r.column(r.chart.x);
  const auto yi = r.column(r.chart.y.at(0));
  std::optional<std::size_t> gi;
  if (!r.chart.group.empty()) gi = r.column(r.chart.group);

  std::vector<std::string> labels;
  std::vector<double> values;
  std::map<std::string, std::size_t> colour_of;
  std::vector<std::size_t> colours;
  for (const auto& row : r.rows) {
    std::string label = text_of(row[xi]);
    std::string key = label;
    if (gi) {
      key = text_of(row[*gi]);
      label = key + " " + label;
    }
    auto [it, fresh] = colour_of.try_emplace(key, colour_of.size());
    (void)fresh;
    colours.push_back(it->second);
    labels.push_back(label);
    values.push_back(number_of(r, row[yi], r.chart.y[0]));
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const Frame f{Range{0.0, static_cast<double>(values.size())}, padded(*lo, *hi, true)};

  std::string out = header(r);
  axes(out, f, r.chart.group.empty() ? r.chart.x : r.chart.group + " / " + r.chart.x, r.chart.y[0], false);
  const double slot = f.px(1.0) - f.px(0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = f.px(static_cast<double>(i)) + 0.15 * slot;
    const double top = f.py(std::max(values[i], 0.0));
    const double base = f.py(std::min(values[i], 0.0));
    out += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(0.7 * slot) + "\" height=\"" +
           fmt(base - top) + "\" fill=\"" + kPalette[colours[i] % std::size(kPalette)] + "\"/>\n";
    out += "<text x=\"" + fmt(x + 0.35 * slot) + "\" y=\"" + fmt(top - 4) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" +
           csv::format_number(values[i]) + "</text>\n";
    out += "<text x=\"" + fmt(x + 0.35 * slot) + "\" y=\"" + fmt(kHeight - kBottom + 16) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" + escape(labels[i]) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string emit_svg(const ExperimentReport& report, ChartKind kind) {
  if (report.rows.empty()) throw InputError("emit_svg: report " + report.id + " has no rows");
  if (report.chart.x.empty() || report.chart.y.empty()) {
    throw InputError("emit_svg: report " + report.id + " has no chart columns");
  }
  return kind == ChartKind::Line ? line_chart(report) : bar_chart(report);
}

}  // namespace cmasim
