#pragma once

// Core value types: image grids and view-major sinograms.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fewview {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// 2D attenuation map, row-major. Row 0 is the top of the image.
class ImageGrid {
public:
    ImageGrid() = default;

    ImageGrid(std::size_t height, std::size_t width, double pixel_size = 1.0)
        : height_(height), width_(width), pixel_size_(pixel_size), values_(height * width, 0.0f)
    {
        if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
            throw Error("ImageGrid: pixel_size must be positive and finite");
    }

    ImageGrid(std::size_t height, std::size_t width, std::vector<float> values, double pixel_size = 1.0)
        : height_(height), width_(width), pixel_size_(pixel_size), values_(std::move(values))
    {
        if (values_.size() != height_ * width_)
            throw DimensionError("ImageGrid: expected " + std::to_string(height_ * width_) + " values, got " +
                                 std::to_string(values_.size()));
        if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
            throw Error("ImageGrid: pixel_size must be positive and finite");
        for (float v : values_)
            if (!std::isfinite(v)) throw Error("ImageGrid: non-finite value");
    }

    static ImageGrid filled(std::size_t height, std::size_t width, float value, double pixel_size = 1.0)
    {
        return ImageGrid(height, width, std::vector<float>(height * width, value), pixel_size);
    }

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t size() const { return values_.size(); }
    double pixel_size() const { return pixel_size_; }

    float operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
    float& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }

    std::span<const float> values() const { return values_; }
    std::span<float> values() { return values_; }

    bool same_shape(const ImageGrid& other) const { return height_ == other.height_ && width_ == other.width_; }

    float min_value() const
    {
        float m = values_.empty() ? 0.0f : values_.front();
        for (float v : values_) m = v < m ? v : m;
        return m;
    }

    double sum() const
    {
        double s = 0.0;
        for (float v : values_) s += v;
        return s;
    }

    friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    double pixel_size_ = 1.0;
    std::vector<float> values_;
};

/// Projection data, one row per view angle.
class Sinogram {
public:
    Sinogram() = default;

    Sinogram(std::vector<double> angles_deg, std::size_t num_bins)
        : angles_deg_(std::move(angles_deg)), num_bins_(num_bins), values_(angles_deg_.size() * num_bins, 0.0f)
    {
        validate_angles(angles_deg_);
    }

    Sinogram(std::vector<double> angles_deg, std::size_t num_bins, std::vector<float> values)
        : angles_deg_(std::move(angles_deg)), num_bins_(num_bins), values_(std::move(values))
    {
        validate_angles(angles_deg_);
        if (values_.size() != angles_deg_.size() * num_bins_)
            throw DimensionError("Sinogram: expected " + std::to_string(angles_deg_.size() * num_bins_) +
                                 " values, got " + std::to_string(values_.size()));
        for (float v : values_)
            if (!std::isfinite(v)) throw Error("Sinogram: non-finite value");
    }

    std::size_t num_views() const { return angles_deg_.size(); }
    std::size_t num_bins() const { return num_bins_; }
    const std::vector<double>& angles_deg() const { return angles_deg_; }

    std::span<const float> values() const { return values_; }
    std::span<float> values() { return values_; }

    std::span<const float> view(std::size_t v) const { return {values_.data() + v * num_bins_, num_bins_}; }
    std::span<float> view(std::size_t v) { return {values_.data() + v * num_bins_, num_bins_}; }

    friend bool operator==(const Sinogram&, const Sinogram&) = default;

    static void validate_angles(const std::vector<double>& angles)
    {
        for (std::size_t i = 0; i < angles.size(); ++i) {
            if (!std::isfinite(angles[i]) || angles[i] < 0.0 || angles[i] >= 180.0)
                throw Error("Sinogram: angle " + std::to_string(angles[i]) + " outside [0, 180)");
            if (i > 0 && !(angles[i] > angles[i - 1]))
                throw Error("Sinogram: angles must be strictly increasing");
        }
    }

private:
    std::vector<double> angles_deg_;
    std::size_t num_bins_ = 0;
    std::vector<float> values_;
};

/// Evenly spaced angles k * 180 / n for k in [0, n).
inline std::vector<double> uniform_angles(std::size_t n)
{
    std::vector<double> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = 180.0 * static_cast<double>(k) / static_cast<double>(n);
    return a;
}

inline double dot(std::span<const float> a, std::span<const float> b)
{
    if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

inline double squared_norm(std::span<const float> a)
{
    double s = 0.0;
    for (float v : a) s += static_cast<double>(v) * v;
    return s;
}

} // namespace fewview
