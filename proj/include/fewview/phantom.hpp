#pragma once

// Synthetic phantoms and block-mean downsampling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "grid.hpp"

namespace fewview {

enum class PhantomKind { shepp_logan, random_ellipses, uniform_disk };

inline std::string_view to_string(PhantomKind kind)
{
    switch (kind) {
    case PhantomKind::shepp_logan: return "shepp_logan";
    case PhantomKind::random_ellipses: return "random_ellipses";
    case PhantomKind::uniform_disk: return "uniform_disk";
    }
    return "unknown";
}

inline PhantomKind parse_phantom_kind(std::string_view name)
{
    if (name == "shepp_logan") return PhantomKind::shepp_logan;
    if (name == "random_ellipses") return PhantomKind::random_ellipses;
    if (name == "uniform_disk") return PhantomKind::uniform_disk;
    throw Error("unknown phantom kind '" + std::string(name) + "'");
}

struct PhantomSpec {
    PhantomKind kind = PhantomKind::shepp_logan;
    std::uint64_t seed = 0;
    std::size_t size = 128;
};

/// Ellipse in normalized coordinates: the image spans [-1, 1] on both axes, y up.
struct Ellipse {
    double intensity;
    double semi_x;
    double semi_y;
    double center_x;
    double center_y;
    double angle_deg;

    bool contains(double x, double y) const
    {
        const double phi = angle_deg * std::numbers::pi / 180.0;
        const double c = std::cos(phi), s = std::sin(phi);
        const double dx = x - center_x, dy = y - center_y;
        const double u = (dx * c + dy * s) / semi_x;
        const double v = (-dx * s + dy * c) / semi_y;
        return u * u + v * v <= 1.0;
    }
};

/// Modified (high-contrast) Shepp-Logan ellipse table.
inline std::vector<Ellipse> shepp_logan_ellipses()
{
    return {
        {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    };
}

/// Sums ellipse intensities at pixel centers, clamped to [0, 1].
inline ImageGrid rasterize(const std::vector<Ellipse>& ellipses, std::size_t size)
{
    ImageGrid img(size, size);
    const double n = static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double y = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
        for (std::size_t j = 0; j < size; ++j) {
            const double x = (2.0 * static_cast<double>(j) + 1.0) / n - 1.0;
            double v = 0.0;
            for (const auto& e : ellipses)
                if (e.contains(x, y)) v += e.intensity;
            img(i, j) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    return img;
}

namespace detail {

// Portable uniform draw in [lo, hi); std:: distributions are implementation-defined.
inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

} // namespace detail

inline std::vector<Ellipse> random_ellipses(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<Ellipse> out;
    const double body_x = detail::uniform(rng, 0.6, 0.85);
    const double body_y = detail::uniform(rng, 0.6, 0.9);
    out.push_back({detail::uniform(rng, 0.4, 0.7), body_x, body_y, 0.0, 0.0, detail::uniform(rng, -15.0, 15.0)});

    const int count = 3 + static_cast<int>(rng() % 6);
    for (int k = 0; k < count; ++k) {
        const double r = detail::uniform(rng, 0.0, 0.6);
        const double t = detail::uniform(rng, 0.0, 2.0 * std::numbers::pi);
        double intensity = detail::uniform(rng, -0.35, 0.45);
        if (std::abs(intensity) < 0.1) intensity = intensity < 0 ? -0.1 : 0.1;
        out.push_back({intensity, detail::uniform(rng, 0.04, 0.25), detail::uniform(rng, 0.04, 0.25),
                       r * body_x * std::cos(t), r * body_y * std::sin(t), detail::uniform(rng, 0.0, 180.0)});
    }
    return out;
}

/// Binary disk of radius 0.3125 * size pixels (40 px at 128) about the grid center.
inline ImageGrid uniform_disk(std::size_t size)
{
    ImageGrid img(size, size);
    const double c = (static_cast<double>(size) - 1.0) / 2.0;
    const double r = 0.3125 * static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
            const double dy = static_cast<double>(i) - c, dx = static_cast<double>(j) - c;
            img(i, j) = dx * dx + dy * dy <= r * r ? 1.0f : 0.0f;
        }
    return img;
}

inline double uniform_disk_radius(std::size_t size) { return 0.3125 * static_cast<double>(size); }

inline ImageGrid make_phantom(const PhantomSpec& spec)
{
    if (spec.size < 16) throw Error("make_phantom: size must be at least 16, got " + std::to_string(spec.size));
    switch (spec.kind) {
    case PhantomKind::shepp_logan: return rasterize(shepp_logan_ellipses(), spec.size);
    case PhantomKind::random_ellipses: return rasterize(random_ellipses(spec.seed), spec.size);
    case PhantomKind::uniform_disk: return uniform_disk(spec.size);
    }
    throw Error("make_phantom: unknown kind");
}

/// Stable sample identifier, e.g. "random_ellipses_0007".
inline std::string phantom_id(const PhantomSpec& spec)
{
    std::string seed = std::to_string(spec.seed);
    if (seed.size() < 4) seed.insert(0, 4 - seed.size(), '0');
    return std::string(to_string(spec.kind)) + "_" + seed;
}

/// Mean pooling over factor x factor blocks.
inline ImageGrid downsample(const ImageGrid& img, std::size_t factor)
{
    if (factor == 0 || img.height() % factor != 0 || img.width() % factor != 0)
        throw DimensionError("downsample: factor " + std::to_string(factor) + " does not divide " +
                             std::to_string(img.height()) + "x" + std::to_string(img.width()));
    const std::size_t h = img.height() / factor, w = img.width() / factor;
    ImageGrid out(h, w, img.pixel_size() * static_cast<double>(factor));
    const double inv = 1.0 / static_cast<double>(factor * factor);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < factor; ++a)
                for (std::size_t b = 0; b < factor; ++b) s += img(i * factor + a, j * factor + b);
            out(i, j) = static_cast<float>(s * inv);
        }
    return out;
}

/// Min-max rescale to [0, 1]; a constant image maps to zeros.
inline ImageGrid normalize_unit_range(const ImageGrid& img)
{
    float lo = img.min_value(), hi = lo;
    for (float v : img.values()) hi = std::max(hi, v);
    ImageGrid out(img.height(), img.width(), img.pixel_size());
    if (hi > lo) {
        const double scale = 1.0 / (static_cast<double>(hi) - lo);
        for (std::size_t k = 0; k < img.size(); ++k)
            out.values()[k] = static_cast<float>((static_cast<double>(img.values()[k]) - lo) * scale);
    }
    return out;
}

} // namespace fewview
