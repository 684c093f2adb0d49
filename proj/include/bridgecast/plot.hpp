#pragma once

#include <string>
#include <vector>

namespace bridgecast {

// Static SVG for one window and one channel: truth line over context and
// horizon, forecast line over the horizon, optional q05-q95 band.
struct PlotSeries {
  std::vector<double> context_truth;   // trailing lookback values
  std::vector<double> horizon_truth;
  std::vector<double> forecast;        // point or median, horizon length
  std::vector<double> band_low;        // empty when no band
  std::vector<double> band_high;
  std::string title;
};

std::string render_forecast_svg(const PlotSeries& series);
void write_forecast_svg(const std::string& path, const PlotSeries& series);

}  // namespace bridgecast
