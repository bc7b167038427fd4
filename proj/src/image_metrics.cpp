#include "pglab/image_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "pglab/errors.hpp"

namespace pglab {

Hsv rgb_to_hsv(const Rgb& p) {
    const double mx = std::max({p.r, p.g, p.b});
    const double mn = std::min({p.r, p.g, p.b});
    const double c = mx - mn;
    Hsv out;
    out.v = mx;
    out.s = mx > 0.0 ? c / mx : 0.0;
    if (c > 0.0) {
        double h;
        if (mx == p.r) {
            h = (p.g - p.b) / c;
        } else if (mx == p.g) {
            h = (p.b - p.r) / c + 2.0;
        } else {
            h = (p.r - p.g) / c + 4.0;
        }
        h /= 6.0;
        if (h < 0.0) h += 1.0;
        if (h >= 1.0) h -= 1.0;
        out.h = h;
    }
    return out;
}

Rgb hsv_to_rgb(const Hsv& hsv) {
    const double h6 = (hsv.h - std::floor(hsv.h)) * 6.0;
    const double c = hsv.v * hsv.s;
    const double x = c * (1.0 - std::abs(std::fmod(h6, 2.0) - 1.0));
    const double m = hsv.v - c;
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h6) % 6) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    return {r + m, g + m, b + m};
}

ImageRGB::ImageRGB(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), data_(std::move(pixels)) {
    if (width_ == 0 || height_ == 0) throw ContractError("image must have at least one pixel");
    if (data_.size() != 3 * width_ * height_) {
        std::ostringstream msg;
        msg << "expected " << 3 * width_ * height_ << " channel values, got " << data_.size();
        throw ContractError(msg.str());
    }
    for (double v : data_)
        if (!(v >= 0.0 && v <= 1.0)) throw ContractError("channel values must lie in [0, 1]");
}

ImageRGB ImageRGB::solid(std::size_t width, std::size_t height, const Rgb& color) {
    std::vector<double> px;
    px.reserve(3 * width * height);
    for (std::size_t i = 0; i < width * height; ++i) {
        px.push_back(color.r);
        px.push_back(color.g);
        px.push_back(color.b);
    }
    return ImageRGB(width, height, std::move(px));
}

double mean_saturation(const ImageRGB& image) {
    double acc = 0.0;
    for (std::size_t i = 0; i < image.pixel_count(); ++i) acc += rgb_to_hsv(image.pixel(i)).s;
    return acc / static_cast<double>(image.pixel_count());
}

double rms_contrast(const ImageRGB& image) {
    const std::vector<double> gray = channel_values(image, Channel::gray);
    const double n = static_cast<double>(gray.size());
    const double mean = std::accumulate(gray.begin(), gray.end(), 0.0) / n;
    double ss = 0.0;
    for (double g : gray) ss += (g - mean) * (g - mean);
    return std::sqrt(ss / n);
}

std::vector<double> channel_values(const ImageRGB& image, Channel channel) {
    std::vector<double> out(image.pixel_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const Rgb p = image.pixel(i);
        switch (channel) {
            case Channel::red: out[i] = p.r; break;
            case Channel::green: out[i] = p.g; break;
            case Channel::blue: out[i] = p.b; break;
            case Channel::saturation: out[i] = rgb_to_hsv(p).s; break;
            case Channel::gray: out[i] = grayscale(p); break;
        }
    }
    return out;
}

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::red: return "red";
        case Channel::green: return "green";
        case Channel::blue: return "blue";
        case Channel::saturation: return "saturation";
        case Channel::gray: return "gray";
    }
    return "unknown";
}

double DensityEstimate::integral() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        acc += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
    return acc;
}

double silverman_bandwidth(std::span<const double> values) {
    if (values.size() < 2) throw ContractError("bandwidth selection needs at least two values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0))
        throw DegenerateBandwidthError(
            "all values are identical; pass an explicit bandwidth for the KDE");
    return 1.06 * sd * std::pow(n, -0.2);
}

DensityEstimate kde(std::span<const double> values, std::optional<double> bandwidth,
                    std::size_t grid_size) {
    if (values.size() < 2) throw ContractError("kde needs at least two values");
    if (grid_size < 16) throw ContractError("kde grid needs at least 16 points");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(values);
    if (!(h > 0.0) || !std::isfinite(h)) throw ContractError("kde bandwidth must be finite and > 0");

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front() - 5.0 * h;
    const double hi = sorted.back() + 5.0 * h;

    DensityEstimate out;
    out.bandwidth = h;
    out.grid.resize(grid_size);
    out.density.assign(grid_size, 0.0);
    const double step = (hi - lo) / static_cast<double>(grid_size - 1);
    // Kernel terms beyond 9h are below exp(-40) and skipped.
    const double reach = 9.0 * h;
    const double norm = 1.0 / (static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid_size; ++g) {
        // symmetric construction keeps mirrored data mirrored on the grid
        const double x = g + 1 == grid_size ? hi : lo + static_cast<double>(g) * step;
        out.grid[g] = x;
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
        const auto last = std::upper_bound(first, sorted.end(), x + reach);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) {
            const double u = (x - *it) / h;
            acc += std::exp(-0.5 * u * u);
        }
        out.density[g] = acc * norm;
    }
    return out;
}

ColorReport batch_color_report(std::span<const ImageRGB> images, std::span<const std::string> names) {
    if (images.empty()) throw ContractError("color report needs at least one image");
    if (!names.empty() && names.size() != images.size())
        throw ContractError("one name per image required");
    ColorReport report;
    report.rows.resize(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) {
        auto& row = report.rows[i];
        row.name = names.empty() ? "image_" + std::to_string(i) : names[i];
        row.saturation = mean_saturation(images[i]);
        row.contrast = rms_contrast(images[i]);
    }
    double s = 0.0, c = 0.0;
    for (const auto& row : report.rows) {
        s += row.saturation;
        c += row.contrast;
    }
    report.mean_saturation = s / static_cast<double>(images.size());
    report.mean_contrast = c / static_cast<double>(images.size());
    return report;
}

}  // namespace pglab
