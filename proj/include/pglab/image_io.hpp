#pragma once

// Image loading for the metrics pipeline.
//
// PNG: 8- or 16-bit; gray, palette, RGB and RGBA inputs are expanded to RGB
// and any alpha channel is ignored. Values are scaled to [0, 1].
//
// CSV grid: one image row per line, each line r,g,b,r,g,b,... with values in
// [0, 1]. Blank lines and lines starting with '#' are skipped. All rows must
// have the same length.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "pglab/image_metrics.hpp"

namespace pglab {

class ImageReadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ImageRGB read_png(const std::filesystem::path& path);
ImageRGB read_csv_image(const std::filesystem::path& path);

// Dispatch on extension (.png, .csv).
ImageRGB read_image(const std::filesystem::path& path);

// bit_depth is 8 or 16; with_alpha adds an opaque alpha channel.
void write_png(const std::filesystem::path& path, const ImageRGB& image, int bit_depth = 8,
               bool with_alpha = false);

// Regular files directly inside `directory` whose names match the shell glob.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& directory,
                                               const std::string& glob);

// Reads and scores every file; unreadable files are skipped and counted.
// `jobs` bounds the worker threads.
ColorReport color_report_from_files(std::span<const std::filesystem::path> files, unsigned jobs = 1);

}  // namespace pglab
