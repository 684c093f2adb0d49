#include "bridgecast/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bridgecast/errors.hpp"

namespace bridgecast {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 340.0;
constexpr double kPad = 36.0;

struct Scale {
  double x0, x1, y0, y1;
  double px(double x) const { return kPad + (x - x0) / (x1 - x0) * (kWidth - 2 * kPad); }
  double py(double y) const {
    if (y1 == y0) return kHeight / 2;
    return kHeight - kPad - (y - y0) / (y1 - y0) * (kHeight - 2 * kPad);
  }
};

void extend_range(const std::vector<double>& v, double* lo, double* hi) {
  for (double x : v) {
    *lo = std::min(*lo, x);
    *hi = std::max(*hi, x);
  }
}

std::string polyline(const std::vector<double>& v, int x_offset, const Scale& sc,
                     const char* color, double width) {
  std::ostringstream out;
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
      << "\" points=\"";
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << sc.px(x_offset + static_cast<double>(i)) << ',' << sc.py(v[i]) << ' ';
  }
  out << "\"/>\n";
  return out.str();
}

}  // namespace

std::string render_forecast_svg(const PlotSeries& series) {
  const int n_ctx = static_cast<int>(series.context_truth.size());
  const int n_hor = static_cast<int>(series.horizon_truth.size());
  if (n_hor == 0 || series.forecast.size() != series.horizon_truth.size()) {
    throw std::invalid_argument("plot needs matching horizon truth and forecast");
  }
  const bool band = !series.band_low.empty();
  if (band && (series.band_low.size() != series.forecast.size() ||
               series.band_high.size() != series.forecast.size())) {
    throw std::invalid_argument("plot band must match the horizon length");
  }

  double lo = series.horizon_truth[0], hi = series.horizon_truth[0];
  extend_range(series.context_truth, &lo, &hi);
  extend_range(series.horizon_truth, &lo, &hi);
  extend_range(series.forecast, &lo, &hi);
  if (band) {
    extend_range(series.band_low, &lo, &hi);
    extend_range(series.band_high, &lo, &hi);
  }
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }
  const Scale sc{0.0, static_cast<double>(n_ctx + n_hor - 1), lo, hi};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!series.title.empty()) {
    out << "<text x=\"" << kPad << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">"
        << series.title << "</text>\n";
  }
  // forecast start marker
  const double xs = sc.px(n_ctx > 0 ? n_ctx - 1 : 0);
  out << "<line x1=\"" << xs << "\" y1=\"" << kPad << "\" x2=\"" << xs << "\" y2=\""
      << kHeight - kPad << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>\n";

  if (band) {
    out << "<path fill=\"#ffa50055\" stroke=\"none\" d=\"M";
    for (int i = 0; i < n_hor; ++i) {
      out << sc.px(n_ctx + i) << ',' << sc.py(series.band_high[static_cast<std::size_t>(i)]) << ' ';
    }
    for (int i = n_hor - 1; i >= 0; --i) {
      out << sc.px(n_ctx + i) << ',' << sc.py(series.band_low[static_cast<std::size_t>(i)]) << ' ';
    }
    out << "Z\"/>\n";
  }
  if (n_ctx > 0) out << polyline(series.context_truth, 0, sc, "#6a0dad", 1.2);
  out << polyline(series.horizon_truth, n_ctx, sc, "#6a0dad", 1.6);
  out << polyline(series.forecast, n_ctx, sc, "#ff8c00", 1.6);
  out << "</svg>\n";
  return out.str();
}

void write_forecast_svg(const std::string& path, const PlotSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write plot to " + path);
  out << render_forecast_svg(series);
}

}  // namespace bridgecast
