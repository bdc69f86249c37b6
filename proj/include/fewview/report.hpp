#pragma once

// Aggregation of metric rows into per-(method, views) summaries and
// PSNR/SSIM-versus-views line plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "png.hpp"

namespace fewview {

struct SummaryRow {
    std::string method;
    int num_views = 0;
    std::size_t samples = 0;
    double mean_psnr = 0.0;
    double median_psnr = 0.0;
    double mean_ssim = 0.0;
};

inline double median(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Methods keep their first-seen order; views are ascending.
inline std::vector<SummaryRow> summarize(const std::vector<MetricRecord>& records)
{
    std::vector<std::string> methods;
    std::map<std::pair<std::string, int>, std::vector<const MetricRecord*>> groups;
    for (const auto& r : records) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        groups[{r.method, r.num_views}].push_back(&r);
    }
    std::vector<SummaryRow> rows;
    for (const auto& m : methods)
        for (const auto& [key, group] : groups) {
            if (key.first != m) continue;
            SummaryRow row{m, key.second, group.size()};
            std::vector<double> p;
            for (const auto* r : group) {
                p.push_back(r->psnr_db);
                row.mean_ssim += r->ssim;
            }
            for (double v : p) row.mean_psnr += v;
            row.mean_psnr /= static_cast<double>(group.size());
            row.mean_ssim /= static_cast<double>(group.size());
            row.median_psnr = median(std::move(p));
            rows.push_back(row);
        }
    return rows;
}

inline void write_summary_table(std::ostream& out, const std::vector<SummaryRow>& rows)
{
    out << "| method | views | samples | mean PSNR (dB) | median PSNR (dB) | mean SSIM |\n";
    out << "|---|---:|---:|---:|---:|---:|\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "| %s | %d | %zu | %.3f | %.3f | %.4f |\n", r.method.c_str(), r.num_views,
                      r.samples, r.mean_psnr, r.median_psnr, r.mean_ssim);
        out << buf;
    }
}

namespace detail {

inline void draw_line(RgbImage& img, long r0, long c0, long r1, long c1, const std::uint8_t (&rgb)[3], int thick = 1)
{
    const long dr = std::abs(r1 - r0), dc = std::abs(c1 - c0);
    const long sr = r0 < r1 ? 1 : -1, sc = c0 < c1 ? 1 : -1;
    long err = dc - dr;
    for (;;) {
        for (int a = -thick / 2; a <= thick / 2; ++a)
            for (int b = -thick / 2; b <= thick / 2; ++b) img.set(r0 + a, c0 + b, rgb[0], rgb[1], rgb[2]);
        if (r0 == r1 && c0 == c1) break;
        const long e2 = 2 * err;
        if (e2 > -dr) {
            err -= dr;
            c0 += sc;
        }
        if (e2 < dc) {
            err += dc;
            r0 += sr;
        }
    }
}

} // namespace detail

/// Line plot of one metric against view count, one colored series per method
/// (blue, red, green, ... in summary order). Axes span the data range.
inline RgbImage plot_metric(const std::vector<SummaryRow>& rows, bool use_ssim, std::size_t height = 360,
                            std::size_t width = 480)
{
    static const std::uint8_t palette[][3] = {{31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {148, 103, 189},
                                              {255, 127, 14}};
    static const std::uint8_t axis[3] = {0, 0, 0};
    static const std::uint8_t grid[3] = {220, 220, 220};
    RgbImage img(height, width);
    if (rows.empty()) return img;

    auto value = [&](const SummaryRow& r) { return use_ssim ? r.mean_ssim : r.mean_psnr; };
    double vmin = value(rows[0]), vmax = vmin;
    int xmin = rows[0].num_views, xmax = xmin;
    for (const auto& r : rows) {
        vmin = std::min(vmin, value(r));
        vmax = std::max(vmax, value(r));
        xmin = std::min(xmin, r.num_views);
        xmax = std::max(xmax, r.num_views);
    }
    const double pad = std::max((vmax - vmin) * 0.1, 1e-6);
    vmin -= pad;
    vmax += pad;
    const long left = 40, right = static_cast<long>(width) - 20, top = 20, bottom = static_cast<long>(height) - 40;
    auto px = [&](int views) {
        return xmax == xmin ? (left + right) / 2
                            : left + std::lround(static_cast<double>(views - xmin) / (xmax - xmin) * (right - left));
    };
    auto py = [&](double v) { return bottom - std::lround((v - vmin) / (vmax - vmin) * (bottom - top)); };

    for (int g = 0; g <= 4; ++g) {
        const long y = top + (bottom - top) * g / 4;
        detail::draw_line(img, y, left, y, right, grid);
    }
    detail::draw_line(img, bottom, left, bottom, right, axis);
    detail::draw_line(img, top, left, bottom, left, axis);

    std::vector<std::string> methods;
    for (const auto& r : rows)
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto& color = palette[m % std::size(palette)];
        const SummaryRow* prev = nullptr;
        for (const auto& r : rows) {
            if (r.method != methods[m]) continue;
            const long x = px(r.num_views), y = py(value(r));
            for (long a = -3; a <= 3; ++a)
                for (long b = -3; b <= 3; ++b) img.set(y + a, x + b, color[0], color[1], color[2]);
            if (prev) detail::draw_line(img, py(value(*prev)), px(prev->num_views), y, x, color, 2);
            prev = &r;
        }
    }
    return img;
}

/// Writes summary.md, psnr_vs_views.png and ssim_vs_views.png into `dir`.
inline std::vector<SummaryRow> write_report(const std::vector<MetricRecord>& records, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    const auto rows = summarize(records);
    {
        std::ofstream md(dir / "summary.md", std::ios::trunc);
        if (!md) throw Error("cannot write '" + (dir / "summary.md").string() + "'");
        write_summary_table(md, rows);
    }
    write_png_rgb(dir / "psnr_vs_views.png", plot_metric(rows, false));
    write_png_rgb(dir / "ssim_vs_views.png", plot_metric(rows, true));
    return rows;
}

} // namespace fewview
