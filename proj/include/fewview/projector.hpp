#pragma once

// Joseph-style ray-driven parallel-beam projector and its exact transpose.
//
// Pixel (row i, col j) has center x = (j - c) * p, y = (c - i) * p with
// c = (N - 1) / 2. Detector bin b sits at offset s = (b - (D - 1) / 2) * ds.
// The ray for (theta, s) is { s * (-sin, cos) + t * (cos, sin) }, so the 0
// degree view integrates along image rows. Each ray is sampled once per
// column (mostly-horizontal rays) or once per row (mostly-vertical rays) with
// linear interpolation between the two straddling pixels; pixels outside the
// grid contribute zero.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "grid.hpp"

namespace fewview {

struct ProjectionGeometry {
    std::size_t image_size = 128;
    std::size_t num_bins = 128;
    std::vector<double> angles_deg;
    double pixel_size = 1.0;
    double detector_spacing = 1.0;

    /// Detector matched to the grid: num_bins = image_size, spacing = pixel_size.
    static ProjectionGeometry parallel(std::size_t image_size, std::vector<double> angles_deg,
                                       double pixel_size = 1.0)
    {
        ProjectionGeometry g{image_size, image_size, std::move(angles_deg), pixel_size, pixel_size};
        g.validate();
        return g;
    }

    static ProjectionGeometry for_sinogram(const Sinogram& sino, double pixel_size = 1.0)
    {
        return parallel(sino.num_bins(), sino.angles_deg(), pixel_size);
    }

    std::size_t num_views() const { return angles_deg.size(); }
    std::size_t image_pixels() const { return image_size * image_size; }
    std::size_t sinogram_values() const { return num_views() * num_bins; }

    void validate() const
    {
        if (image_size == 0) throw Error("ProjectionGeometry: empty image");
        if (num_bins != image_size)
            throw Error("ProjectionGeometry: num_bins (" + std::to_string(num_bins) + ") must equal image_size (" +
                        std::to_string(image_size) + ")");
        if (!(pixel_size > 0.0) || !(detector_spacing > 0.0))
            throw Error("ProjectionGeometry: spacings must be positive");
        Sinogram::validate_angles(angles_deg);
    }

    void check_image(const ImageGrid& img) const
    {
        if (img.height() != image_size || img.width() != image_size)
            throw DimensionError("image is " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                                 ", geometry expects " + std::to_string(image_size) + "x" +
                                 std::to_string(image_size));
    }

    void check_sinogram(const Sinogram& sino) const
    {
        if (sino.num_bins() != num_bins || sino.angles_deg() != angles_deg)
            throw DimensionError("sinogram (" + std::to_string(sino.num_views()) + " views x " +
                                 std::to_string(sino.num_bins()) + " bins) does not match geometry (" +
                                 std::to_string(num_views()) + " views x " + std::to_string(num_bins) + " bins)");
    }
};

/// Precomputed projector for one geometry. Apply functions work on raw
/// spans so the solver can iterate in double precision.
class ParallelProjector {
public:
    explicit ParallelProjector(ProjectionGeometry geom) : geom_(std::move(geom))
    {
        geom_.validate();
        views_.reserve(geom_.num_views());
        for (double deg : geom_.angles_deg) {
            const double th = deg * std::numbers::pi / 180.0;
            views_.push_back({std::cos(th), std::sin(th)});
        }
    }

    const ProjectionGeometry& geometry() const { return geom_; }

    /// out[v, b] = sum over samples of weight * image; out is overwritten.
    template <typename In, typename Out>
    void forward(std::span<const In> image, std::span<Out> out) const
    {
        check_sizes(image.size(), out.size());
        const std::size_t bins = geom_.num_bins;
        for (std::size_t v = 0; v < views_.size(); ++v)
            for (std::size_t b = 0; b < bins; ++b) {
                double acc = 0.0;
                trace(v, b, [&](std::size_t idx, double w) { acc += w * static_cast<double>(image[idx]); });
                out[v * bins + b] = static_cast<Out>(acc);
            }
    }

    /// Transpose of forward(): out is overwritten.
    template <typename In, typename Out>
    void adjoint(std::span<const In> sino, std::span<Out> out) const
    {
        check_sizes(out.size(), sino.size());
        std::vector<double> acc(out.size(), 0.0);
        const std::size_t bins = geom_.num_bins;
        for (std::size_t v = 0; v < views_.size(); ++v)
            for (std::size_t b = 0; b < bins; ++b) {
                const double y = static_cast<double>(sino[v * bins + b]);
                if (y == 0.0) continue;
                trace(v, b, [&](std::size_t idx, double w) { acc[idx] += w * y; });
            }
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = static_cast<Out>(acc[k]);
    }

    /// Visits (pixel index, weight) for every nonzero system-matrix entry of ray (view, bin).
    template <typename Visit>
    void trace(std::size_t view, std::size_t bin, Visit&& visit) const
    {
        const std::size_t n = geom_.image_size;
        const double p = geom_.pixel_size;
        const double c = (static_cast<double>(n) - 1.0) / 2.0;
        const double s = (static_cast<double>(bin) - (static_cast<double>(geom_.num_bins) - 1.0) / 2.0) *
                         geom_.detector_spacing;
        const auto [cs, sn] = views_[view];

        if (std::abs(cs) >= std::abs(sn)) {
            // One sample per column: y = s / cos + x * tan.
            const double w = p / std::abs(cs);
            const double tn = sn / cs;
            const double y0 = s / cs;
            for (std::size_t j = 0; j < n; ++j) {
                const double x = (static_cast<double>(j) - c) * p;
                const double r = c - (y0 + x * tn) / p;
                interpolate(r, n, [&](std::size_t i, double f) { visit(i * n + j, w * f); });
            }
        } else {
            // One sample per row: x = y * cot - s / sin.
            const double w = p / std::abs(sn);
            const double ct = cs / sn;
            const double x0 = -s / sn;
            for (std::size_t i = 0; i < n; ++i) {
                const double y = (c - static_cast<double>(i)) * p;
                const double q = (x0 + y * ct) / p + c;
                interpolate(q, n, [&](std::size_t j, double f) { visit(i * n + j, w * f); });
            }
        }
    }

private:
    struct Trig {
        double cos;
        double sin;
    };

    template <typename Emit>
    static void interpolate(double coord, std::size_t n, Emit&& emit)
    {
        const double fl = std::floor(coord);
        if (fl < -1.0 || fl > static_cast<double>(n) - 1.0) return;
        const double f = coord - fl;
        const auto lo = static_cast<long>(fl);
        if (lo >= 0 && 1.0 - f > 0.0) emit(static_cast<std::size_t>(lo), 1.0 - f);
        if (lo + 1 < static_cast<long>(n) && f > 0.0) emit(static_cast<std::size_t>(lo + 1), f);
    }

    void check_sizes(std::size_t image_len, std::size_t sino_len) const
    {
        if (image_len != geom_.image_pixels())
            throw DimensionError("projector: image buffer has " + std::to_string(image_len) + " values, expected " +
                                 std::to_string(geom_.image_pixels()));
        if (sino_len != geom_.sinogram_values())
            throw DimensionError("projector: sinogram buffer has " + std::to_string(sino_len) +
                                 " values, expected " + std::to_string(geom_.sinogram_values()));
    }

    ProjectionGeometry geom_;
    std::vector<Trig> views_;
};

inline Sinogram forward_project(const ImageGrid& img, const ProjectionGeometry& geom)
{
    geom.check_image(img);
    ParallelProjector proj(geom);
    Sinogram out(geom.angles_deg, geom.num_bins);
    proj.forward(img.values(), out.values());
    return out;
}

inline ImageGrid back_project(const Sinogram& sino, const ProjectionGeometry& geom)
{
    geom.check_sinogram(sino);
    ParallelProjector proj(geom);
    ImageGrid out(geom.image_size, geom.image_size, geom.pixel_size);
    proj.adjoint(sino.values(), out.values());
    return out;
}

/// Power-iteration estimate of the spectral norm of A. The start vector is
/// drawn from a fixed seed, so the result is deterministic and nondecreasing
/// in `iters`.
inline double op_norm_estimate(const ProjectionGeometry& geom, int iters, std::uint64_t seed = 0x5eed)
{
    if (iters < 1) throw Error("op_norm_estimate: iters must be >= 1");
    ParallelProjector proj(geom);
    std::mt19937_64 rng(seed);
    std::vector<double> v(geom.image_pixels()), w(geom.image_pixels()), av(geom.sinogram_values());
    for (auto& x : v) x = static_cast<double>(rng() >> 11) * 0x1.0p-53 + 0.5;

    auto normalize = [](std::vector<double>& x) {
        double s = 0.0;
        for (double e : x) s += e * e;
        const double inv = s > 0.0 ? 1.0 / std::sqrt(s) : 0.0;
        for (double& e : x) e *= inv;
    };
    normalize(v);
    for (int k = 0; k < iters; ++k) {
        proj.forward(std::span<const double>(v), std::span<double>(av));
        proj.adjoint(std::span<const double>(av), std::span<double>(w));
        v.swap(w);
        normalize(v);
    }
    proj.forward(std::span<const double>(v), std::span<double>(av));
    double s = 0.0;
    for (double e : av) s += e * e;
    return std::sqrt(s);
}

} // namespace fewview
