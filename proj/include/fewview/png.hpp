#pragma once

// Minimal libpng wrappers: 8-bit grayscale/RGB output and grayscale ingestion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

#include <png.h>

#include "grid.hpp"

namespace fewview {

struct RgbImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels; // interleaved RGB

    RgbImage(std::size_t h, std::size_t w, std::uint8_t fill = 255)
        : height(h), width(w), pixels(h * w * 3, fill)
    {
    }

    void set(long row, long col, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    {
        if (row < 0 || col < 0 || static_cast<std::size_t>(row) >= height || static_cast<std::size_t>(col) >= width)
            return;
        auto* p = &pixels[(static_cast<std::size_t>(row) * width + static_cast<std::size_t>(col)) * 3];
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline void write_png(const std::filesystem::path& path, std::size_t height, std::size_t width, int color_type,
                      const std::uint8_t* data, std::size_t row_bytes)
{
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw Error("cannot open '" + path.string() + "' for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error("libpng: failed writing '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < height; ++r)
        png_write_row(png, const_cast<png_bytep>(data + r * row_bytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

} // namespace detail

/// Writes an image as 8-bit grayscale, mapping [lo, hi] to [0, 255].
inline void write_png_gray(const std::filesystem::path& path, const ImageGrid& img, double lo = 0.0, double hi = 1.0)
{
    std::vector<std::uint8_t> bytes(img.size());
    const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
    for (std::size_t k = 0; k < img.size(); ++k)
        bytes[k] = static_cast<std::uint8_t>(std::clamp(std::lround((img.values()[k] - lo) * scale), 0L, 255L));
    detail::write_png(path, img.height(), img.width(), PNG_COLOR_TYPE_GRAY, bytes.data(), img.width());
}

inline void write_png_rgb(const std::filesystem::path& path, const RgbImage& img)
{
    detail::write_png(path, img.height, img.width, PNG_COLOR_TYPE_RGB, img.pixels.data(), img.width * 3);
}

/// Reads any PNG as 8-bit grayscale in [0, 255] (not normalized).
inline ImageGrid read_png_gray(const std::filesystem::path& path)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw Error("cannot read PNG '" + path.string() + "': " + image.message);
    image.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
        png_image_free(&image);
        throw Error("cannot decode PNG '" + path.string() + "': " + image.message);
    }
    std::vector<float> values(buffer.begin(), buffer.end());
    return ImageGrid(image.height, image.width, std::move(values));
}

} // namespace fewview
