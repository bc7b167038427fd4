#pragma once

// Color statistics of RGB images with channel values in [0, 1]:
// mean HSV saturation, RMS contrast and Gaussian kernel density estimates.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pglab {

struct Rgb {
    double r = 0.0, g = 0.0, b = 0.0;
};

struct Hsv {
    double h = 0.0;  // [0, 1)
    double s = 0.0;
    double v = 0.0;
};

// Hexcone model: v = max, s = (max - min) / max (0 for black).
Hsv rgb_to_hsv(const Rgb& rgb);
Rgb hsv_to_rgb(const Hsv& hsv);

// BT.601 luma.
inline double grayscale(const Rgb& p) { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

class ImageRGB {
public:
    // `pixels` is row-major interleaved r,g,b. Throws ContractError if the
    // size does not match or a value falls outside [0, 1].
    ImageRGB(std::size_t width, std::size_t height, std::vector<double> pixels);

    static ImageRGB solid(std::size_t width, std::size_t height, const Rgb& color);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return width_ * height_; }
    Rgb pixel(std::size_t index) const {
        return {data_[3 * index], data_[3 * index + 1], data_[3 * index + 2]};
    }
    std::span<const double> data() const noexcept { return data_; }

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> data_;
};

double mean_saturation(const ImageRGB& image);

// Population standard deviation of the BT.601 grayscale values.
double rms_contrast(const ImageRGB& image);

enum class Channel { red, green, blue, saturation, gray };
std::vector<double> channel_values(const ImageRGB& image, Channel channel);
std::string_view to_string(Channel channel);

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;

    // Trapezoidal integral of density over grid.
    double integral() const;
};

// 1.06 * std * n^(-1/5). Throws DegenerateBandwidthError for zero spread.
double silverman_bandwidth(std::span<const double> values);

// Gaussian-kernel KDE on grid_size uniform points over [min - 5h, max + 5h].
DensityEstimate kde(std::span<const double> values, std::optional<double> bandwidth = std::nullopt,
                    std::size_t grid_size = 512);

struct ColorRow {
    std::string name;
    double saturation = 0.0;
    double contrast = 0.0;
};

struct ColorReport {
    double mean_saturation = 0.0;
    double mean_contrast = 0.0;
    std::vector<ColorRow> rows;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

// Averages both metrics over the images. `names` labels the rows and may be
// empty. Throws ContractError on an empty batch.
ColorReport batch_color_report(std::span<const ImageRGB> images,
                               std::span<const std::string> names = {});

}  // namespace pglab
