#include "pglab/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fnmatch.h>
#include <fstream>
#include <memory>
#include <sstream>

#include "pglab/errors.hpp"
#include "worker_pool.hpp"

namespace pglab {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw ImageReadError("cannot open " + path.string());
    return f;
}

void png_error_to_buffer(png_structp png, png_const_charp msg) {
    std::snprintf(static_cast<char*>(png_get_error_ptr(png)), 256, "%s", msg);
    png_longjmp(png, 1);
}

void png_ignore_warning(png_structp, png_const_charp) {}

// libpng reports errors through longjmp; this frame holds only trivially
// destructible state between setjmp and the libpng calls.
bool decode_png(std::FILE* fp, std::vector<unsigned char>& bytes, png_uint_32& width,
                png_uint_32& height, int& depth, std::string& error) {
    char message[256] = "corrupt or unsupported PNG";
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, message, png_error_to_buffer, png_ignore_warning);
    if (png == nullptr) {
        error = "png_create_read_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        error = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        error = message;
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
        png_set_strip_alpha(png);
    }
    png_read_update_info(png, info);

    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        error = "unexpected channel layout after expansion";
        return false;
    }
    bytes.resize(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = bytes.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool encode_png(std::FILE* fp, const std::vector<unsigned char>& bytes, png_uint_32 width,
                png_uint_32 height, int depth, bool alpha, std::string& error) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) {
        error = "png_create_write_struct failed";
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        error = "png_create_info_struct failed";
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        error = "PNG encoding failed";
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, depth, alpha ? PNG_COLOR_TYPE_RGBA : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes = bytes.size() / height;
    for (png_uint_32 y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(bytes.data() + y * rowbytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

ImageRGB read_png(const std::filesystem::path& path) {
    FilePtr fp = open_file(path, "rb");
    std::vector<unsigned char> bytes;
    png_uint_32 width = 0, height = 0;
    int depth = 0;
    std::string error;
    if (!decode_png(fp.get(), bytes, width, height, depth, error))
        throw ImageReadError(path.string() + ": " + error);

    const std::size_t n = static_cast<std::size_t>(width) * height * 3;
    std::vector<double> px(n);
    if (depth == 16) {
        for (std::size_t i = 0; i < n; ++i)
            px[i] = static_cast<double>((bytes[2 * i] << 8) | bytes[2 * i + 1]) / 65535.0;
    } else {
        for (std::size_t i = 0; i < n; ++i) px[i] = static_cast<double>(bytes[i]) / 255.0;
    }
    return ImageRGB(width, height, std::move(px));
}

void write_png(const std::filesystem::path& path, const ImageRGB& image, int bit_depth,
               bool with_alpha) {
    if (bit_depth != 8 && bit_depth != 16) throw ContractError("PNG bit depth must be 8 or 16");
    const std::size_t channels = with_alpha ? 4 : 3;
    const std::size_t bpc = bit_depth / 8;
    const double maxv = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<unsigned char> bytes(image.pixel_count() * channels * bpc);
    std::size_t o = 0;
    auto put = [&](double v) {
        const auto q = static_cast<unsigned>(std::lround(v * maxv));
        if (bpc == 2) bytes[o++] = static_cast<unsigned char>(q >> 8);
        bytes[o++] = static_cast<unsigned char>(q & 0xFF);
    };
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
        const Rgb p = image.pixel(i);
        put(p.r);
        put(p.g);
        put(p.b);
        if (with_alpha) put(1.0);
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot write " + path.string());
    std::string error;
    if (!encode_png(fp.get(), bytes, static_cast<png_uint_32>(image.width()),
                    static_cast<png_uint_32>(image.height()), bit_depth, with_alpha, error))
        throw std::runtime_error(path.string() + ": " + error);
}

ImageRGB read_csv_image(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ImageReadError("cannot open " + path.string());
    std::vector<double> px;
    std::size_t width = 0, height = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t count = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                px.push_back(v);
            } catch (const std::exception&) {
                throw ImageReadError(path.string() + ": non-numeric cell '" + cell + "'");
            }
            ++count;
        }
        if (count == 0 || count % 3 != 0)
            throw ImageReadError(path.string() + ": row length must be a positive multiple of 3");
        if (width == 0) width = count / 3;
        if (count / 3 != width) throw ImageReadError(path.string() + ": ragged rows");
        ++height;
    }
    if (height == 0) throw ImageReadError(path.string() + ": no pixel rows");
    try {
        return ImageRGB(width, height, std::move(px));
    } catch (const ContractError& e) {
        throw ImageReadError(path.string() + ": " + e.what());
    }
}

ImageRGB read_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return read_png(path);
    if (ext == ".csv") return read_csv_image(path);
    throw ImageReadError(path.string() + ": unsupported extension (expected .png or .csv)");
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& directory,
                                               const std::string& glob) {
    if (!std::filesystem::is_directory(directory))
        throw std::runtime_error("not a directory: " + directory.string());
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        if (fnmatch(glob.c_str(), entry.path().filename().c_str(), 0) == 0) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

ColorReport color_report_from_files(std::span<const std::filesystem::path> files, unsigned jobs) {
    struct Slot {
        std::optional<ColorRow> row;
        std::string error;
    };
    std::vector<Slot> slots(files.size());
    parallel_for(files.size(), jobs, [&](std::size_t i) {
        try {
            const ImageRGB img = read_image(files[i]);
            slots[i].row = ColorRow{files[i].filename().string(), mean_saturation(img), rms_contrast(img)};
        } catch (const std::exception& e) {
            slots[i].error = e.what();
        }
    });

    ColorReport report;
    for (auto& slot : slots) {
        if (slot.row) {
            report.rows.push_back(std::move(*slot.row));
        } else {
            ++report.skipped;
            report.warnings.push_back("skipped " + slot.error);
        }
    }
    if (report.rows.empty()) throw std::runtime_error("no readable images");
    double s = 0.0, c = 0.0;
    for (const auto& row : report.rows) {
        s += row.saturation;
        c += row.contrast;
    }
    report.mean_saturation = s / static_cast<double>(report.rows.size());
    report.mean_contrast = c / static_cast<double>(report.rows.size());
    return report;
}

}  // namespace pglab
