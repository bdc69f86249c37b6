#pragma once

// Smoothed isotropic total variation over forward differences. The difference
// across the last row/column is taken as zero (reflective boundary).

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "grid.hpp"

namespace fewview {

/// Returns sum sqrt(dx^2 + dy^2 + eps^2) and writes its gradient into `grad`.
template <typename T>
double tv_value_grad(std::span<const T> x, std::size_t height, std::size_t width, double epsilon,
                     std::span<double> grad)
{
    if (!(epsilon > 0.0)) throw Error("tv: epsilon must be positive");
    if (x.size() != height * width || grad.size() != x.size()) throw DimensionError("tv: buffer size mismatch");
    for (double& g : grad) g = 0.0;
    const double eps2 = epsilon * epsilon;
    double value = 0.0;
    for (std::size_t i = 0; i < height; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            const std::size_t k = i * width + j;
            const double here = static_cast<double>(x[k]);
            const double dx = j + 1 < width ? static_cast<double>(x[k + 1]) - here : 0.0;
            const double dy = i + 1 < height ? static_cast<double>(x[k + width]) - here : 0.0;
            const double norm = std::sqrt(dx * dx + dy * dy + eps2);
            value += norm;
            grad[k] -= (dx + dy) / norm;
            if (j + 1 < width) grad[k + 1] += dx / norm;
            if (i + 1 < height) grad[k + width] += dy / norm;
        }
    }
    return value;
}

template <typename T>
double tv_value(std::span<const T> x, std::size_t height, std::size_t width, double epsilon)
{
    if (!(epsilon > 0.0)) throw Error("tv: epsilon must be positive");
    if (x.size() != height * width) throw DimensionError("tv: buffer size mismatch");
    const double eps2 = epsilon * epsilon;
    double value = 0.0;
    for (std::size_t i = 0; i < height; ++i)
        for (std::size_t j = 0; j < width; ++j) {
            const std::size_t k = i * width + j;
            const double here = static_cast<double>(x[k]);
            const double dx = j + 1 < width ? static_cast<double>(x[k + 1]) - here : 0.0;
            const double dy = i + 1 < height ? static_cast<double>(x[k + width]) - here : 0.0;
            value += std::sqrt(dx * dx + dy * dy + eps2);
        }
    return value;
}

inline std::pair<double, ImageGrid> tv_value_grad(const ImageGrid& img, double epsilon)
{
    std::vector<double> g(img.size());
    const double value = tv_value_grad(img.values(), img.height(), img.width(), epsilon, std::span<double>(g));
    ImageGrid grad(img.height(), img.width(), img.pixel_size());
    for (std::size_t k = 0; k < g.size(); ++k) grad.values()[k] = static_cast<float>(g[k]);
    return {value, std::move(grad)};
}

inline double tv_value(const ImageGrid& img, double epsilon)
{
    return tv_value(img.values(), img.height(), img.width(), epsilon);
}

} // namespace fewview
