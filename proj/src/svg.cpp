#include "pglab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pglab/errors.hpp"

namespace pglab {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

class Chart {
public:
    Chart(const PlotLabels& labels, std::span<const PlotSeries> series) : labels_(labels), series_(series) {
        for (const auto& s : series) {
            if (s.x.size() != s.y.size()) throw ContractError("plot series x/y lengths differ");
            for (double v : s.x) xr_.add(v);
            for (double v : s.y) yr_.add(v);
        }
        xr_.finish();
        yr_.finish();
    }

    double px(double x) const { return kLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y - yr_.lo) / (yr_.hi - yr_.lo) * (kHeight - kTop - kBottom);
    }

    void header(std::ostringstream& out) const {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
            << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << escape(labels_.title) << "</text>\n";
        const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
        out << "<g stroke=\"black\" stroke-width=\"1\">\n"
            << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
            << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
            << "</g>\n<g font-size=\"11\">\n";
        for (int i = 0; i <= 5; ++i) {
            const double xv = xr_.lo + (xr_.hi - xr_.lo) * i / 5.0;
            const double yv = yr_.lo + (yr_.hi - yr_.lo) * i / 5.0;
            out << "<text x=\"" << num(px(xv)) << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
                << tick_label(xv) << "</text>\n"
                << "<text x=\"" << x0 - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">"
                << tick_label(yv) << "</text>\n";
        }
        out << "</g>\n"
            << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
            << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(labels_.x_label) << "</text>\n"
            << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" "
            << "transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << escape(labels_.y_label)
            << "</text>\n";
    }

    void legend(std::ostringstream& out) const {
        double y = kTop + 10;
        for (std::size_t i = 0; i < series_.size(); ++i) {
            const char* color = kPalette[i % std::size(kPalette)];
            const double x = kWidth - kRight + 15;
            out << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
                << color << "\"/>\n"
                << "<text x=\"" << x + 18 << "\" y=\"" << y + 1 << "\" font-size=\"12\">"
                << escape(series_[i].label) << "</text>\n";
            y += 18;
        }
        out << "</svg>\n";
    }

    std::span<const PlotSeries> series() const { return series_; }

private:
    PlotLabels labels_;
    std::span<const PlotSeries> series_;
    Range xr_;
    Range yr_;
};

}  // namespace

std::string line_plot_svg(const PlotLabels& labels, std::span<const PlotSeries> series) {
    Chart chart(labels, series);
    std::ostringstream out;
    chart.header(out);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[i % std::size(kPalette)]
            << "\" points=\"";
        for (std::size_t k = 0; k < series[i].x.size(); ++k) {
            if (!std::isfinite(series[i].x[k]) || !std::isfinite(series[i].y[k])) continue;
            out << num(chart.px(series[i].x[k])) << ',' << num(chart.py(series[i].y[k])) << ' ';
        }
        out << "\"/>\n";
    }
    chart.legend(out);
    return out.str();
}

std::string scatter_plot_svg(const PlotLabels& labels, std::span<const PlotSeries> series) {
    Chart chart(labels, series);
    std::ostringstream out;
    chart.header(out);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << "<g fill=\"" << kPalette[i % std::size(kPalette)] << "\" fill-opacity=\"0.6\">\n";
        for (std::size_t k = 0; k < series[i].x.size(); ++k) {
            if (!std::isfinite(series[i].x[k]) || !std::isfinite(series[i].y[k])) continue;
            out << "<circle cx=\"" << num(chart.px(series[i].x[k])) << "\" cy=\""
                << num(chart.py(series[i].y[k])) << "\" r=\"2\"/>\n";
        }
        out << "</g>\n";
    }
    chart.legend(out);
    return out.str();
}

}  // namespace pglab
