#pragma once

// Filtered backprojection with the spatial-domain band-limited ramp kernel.

#include <cmath>
#include <numbers>
#include <vector>

#include "grid.hpp"
#include "projector.hpp"

namespace fewview {

/// Ram-Lak tap at integer offset k for detector spacing ds:
/// 1/(4 ds^2) at 0, zero at even offsets, -1/(pi k ds)^2 at odd offsets.
inline double ram_lak_tap(long k, double ds = 1.0)
{
    if (k == 0) return 1.0 / (4.0 * ds * ds);
    if (k % 2 == 0) return 0.0;
    const double d = std::numbers::pi * static_cast<double>(k) * ds;
    return -1.0 / (d * d);
}

/// Linear (zero-padded) convolution of every view with the Ram-Lak kernel.
inline Sinogram ramp_filter(const Sinogram& sino, double detector_spacing = 1.0)
{
    const std::size_t n = sino.num_bins();
    if (n < 2) throw Error("ramp_filter: need at least 2 detector bins");
    std::vector<double> taps(2 * n - 1);
    for (std::size_t m = 0; m < taps.size(); ++m)
        taps[m] = ram_lak_tap(static_cast<long>(m) - static_cast<long>(n - 1), detector_spacing);

    Sinogram out(sino.angles_deg(), n);
    for (std::size_t v = 0; v < sino.num_views(); ++v) {
        const auto in = sino.view(v);
        auto dst = out.view(v);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += taps[i + (n - 1) - k] * static_cast<double>(in[k]);
            dst[i] = static_cast<float>(acc);
        }
    }
    return out;
}

/// (pi / views) * A^T(ramp(y)); negative values are clamped to zero unless
/// `clamp_nonneg` is false.
inline ImageGrid fbp_reconstruct(const Sinogram& sino, const ProjectionGeometry& geom, bool clamp_nonneg = true)
{
    geom.check_sinogram(sino);
    if (sino.num_views() == 0) throw Error("fbp_reconstruct: empty sinogram");
    auto img = back_project(ramp_filter(sino, geom.detector_spacing), geom);
    const double scale = std::numbers::pi / static_cast<double>(sino.num_views()) * geom.detector_spacing /
                         geom.pixel_size;
    for (float& v : img.values()) {
        v = static_cast<float>(v * scale);
        if (clamp_nonneg && v < 0.0f) v = 0.0f;
    }
    return img;
}

} // namespace fewview
