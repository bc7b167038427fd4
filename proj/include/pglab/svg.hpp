#pragma once

// Minimal SVG 1.1 charts: axes, ticks, polylines or point clouds, legend.

#include <span>
#include <string>
#include <vector>

namespace pglab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotLabels {
    std::string title;
    std::string x_label;
    std::string y_label;
};

std::string line_plot_svg(const PlotLabels& labels, std::span<const PlotSeries> series);
std::string scatter_plot_svg(const PlotLabels& labels, std::span<const PlotSeries> series);

}  // namespace pglab
