#include "cli.hpp"

#include "krrbw/error.hpp"
#include "krrbw/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace krrbw::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 300.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 45.0;

const char* color_for(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return palette[i % 5];
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Series {
  std::string method;
  std::vector<const SweepRow*> rows;
};

struct Panel {
  std::string title;
  double (*mean)(const SweepRow&);
  double (*lo)(const SweepRow&);
  double (*hi)(const SweepRow&);
};

}  // namespace

void plot_sweep_svg(std::istream& sweep_csv, std::ostream& svg) {
  const std::vector<SweepRow> rows = read_sweep_csv(sweep_csv);
  if (rows.empty()) throw InputError("sweep CSV has no rows");

  std::vector<Series> series;
  for (const auto& r : rows) {
    auto it = std::find_if(series.begin(), series.end(),
                           [&](const Series& s) { return s.method == r.method; });
    if (it == series.end()) {
      series.push_back({r.method, {}});
      it = series.end() - 1;
    }
    it->rows.push_back(&r);
  }
  for (auto& s : series) {
    std::sort(s.rows.begin(), s.rows.end(),
              [](const SweepRow* a, const SweepRow* b) { return a->axis_value < b->axis_value; });
  }

  const bool log_x = rows.front().axis == "lambda";
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  for (const auto& r : rows) {
    const double x = log_x ? std::log10(r.axis_value) : r.axis_value;
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }

  const Panel panels[] = {
      {"R^2", [](const SweepRow& r) { return r.mean_r2; }, [](const SweepRow& r) { return r.p05_r2; },
       [](const SweepRow& r) { return r.p95_r2; }},
      {"sigma", [](const SweepRow& r) { return r.mean_sigma; },
       [](const SweepRow& r) { return r.p05_sigma; }, [](const SweepRow& r) { return r.p95_sigma; }},
  };

  const double height = 2.0 * (kPanelHeight + kTop + kBottom);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double plot_w = kWidth - kLeft - kRight;
  for (std::size_t p = 0; p < 2; ++p) {
    const Panel& panel = panels[p];
    const double top = static_cast<double>(p) * (kPanelHeight + kTop + kBottom) + kTop;
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -y_min;
    for (const auto& r : rows) {
      for (double v : {panel.lo(r), panel.hi(r), panel.mean(r)}) {
        if (std::isfinite(v)) {
          y_min = std::min(y_min, v);
          y_max = std::max(y_max, v);
        }
      }
    }
    if (!std::isfinite(y_min)) {
      y_min = 0.0;
      y_max = 1.0;
    }
    if (y_max == y_min) {
      y_min -= 0.5;
      y_max += 0.5;
    }
    auto sx = [&](double v) {
      const double x = log_x ? std::log10(v) : v;
      return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
    };
    auto sy = [&](double v) { return top + (y_max - v) / (y_max - y_min) * kPanelHeight; };

    svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w)
        << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(top - 8) << "\">" << panel.title
        << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
      const double yv = y_min + (y_max - y_min) * t / 4.0;
      svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(sy(yv) + 4)
          << "\" text-anchor=\"end\">" << label(yv) << "</text>\n";
      const double xv = x_min + (x_max - x_min) * t / 4.0;
      const double shown = log_x ? std::pow(10.0, xv) : xv;
      svg << "<text x=\"" << num(kLeft + (xv - x_min) / (x_max - x_min) * plot_w) << "\" y=\""
          << num(top + kPanelHeight + 16) << "\" text-anchor=\"middle\">" << label(shown)
          << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(top + kPanelHeight + 34)
        << "\" text-anchor=\"middle\">" << rows.front().axis << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto& rs = series[s].rows;
      std::string band;
      for (const auto* r : rs) band += num(sx(r->axis_value)) + "," + num(sy(panel.hi(*r))) + " ";
      for (auto it = rs.rbegin(); it != rs.rend(); ++it) {
        band += num(sx((*it)->axis_value)) + "," + num(sy(panel.lo(**it))) + " ";
      }
      svg << "<polygon points=\"" << band << "\" fill=\"" << color_for(s)
          << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      std::string line;
      for (const auto* r : rs) line += num(sx(r->axis_value)) + "," + num(sy(panel.mean(*r))) + " ";
      svg << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << color_for(s)
          << "\" stroke-width=\"2\"/>\n";
      const double ly = top + 16.0 + 18.0 * static_cast<double>(s);
      svg << "<line x1=\"" << num(kLeft + plot_w + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
          << num(kLeft + plot_w + 32) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color_for(s)
          << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << num(kLeft + plot_w + 38) << "\" y=\"" << num(ly) << "\">"
          << series[s].method << "</text>\n";
    }
  }
  svg << "</svg>\n";
}

}  // namespace krrbw::cli
