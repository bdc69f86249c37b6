#pragma once

// PSNR and SSIM (Gaussian 11x11 window, sigma 1.5, K1 = 0.01, K2 = 0.03),
// plus the evaluation record and its CSV form.

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "grid.hpp"

namespace fewview {

inline constexpr double kPsnrCapDb = 99.0;

/// 10 log10(range^2 / MSE), capped at 99 dB when MSE < 1e-12.
template <typename T>
double psnr(std::span<const T> a, std::span<const T> b, double data_range = 1.0)
{
    if (a.size() != b.size()) throw DimensionError("psnr: image shapes differ");
    if (!(data_range > 0.0)) throw Error("psnr: data_range must be positive");
    if (a.empty()) throw DimensionError("psnr: empty images");
    double se = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.size());
    if (mse < 1e-12) return kPsnrCapDb;
    return 10.0 * std::log10(data_range * data_range / mse);
}

inline double psnr(const ImageGrid& a, const ImageGrid& b, double data_range = 1.0)
{
    if (!a.same_shape(b)) throw DimensionError("psnr: image shapes differ");
    return psnr(a.values(), b.values(), data_range);
}

namespace detail {

inline constexpr int kSsimWindow = 11;

inline std::array<double, kSsimWindow> ssim_gaussian()
{
    std::array<double, kSsimWindow> w{};
    double sum = 0.0;
    for (int k = 0; k < kSsimWindow; ++k) {
        const double d = k - kSsimWindow / 2;
        w[k] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += w[k];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable "valid" Gaussian filtering of a row-major buffer.
inline std::vector<double> filter_valid(const std::vector<double>& in, std::size_t h, std::size_t w,
                                        const std::array<double, kSsimWindow>& g)
{
    const std::size_t oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
    std::vector<double> rows(h * ow);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += g[k] * in[i * w + j + k];
            rows[i * ow + j] = s;
        }
    std::vector<double> out(oh * ow);
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += g[k] * rows[(i + k) * ow + j];
            out[i * ow + j] = s;
        }
    return out;
}

} // namespace detail

/// Mean SSIM over all fully contained 11x11 windows of two row-major images.
template <typename T>
double ssim(std::span<const T> a, std::span<const T> b, std::size_t h, std::size_t w, double data_range = 1.0)
{
    if (a.size() != h * w || b.size() != h * w) throw DimensionError("ssim: image shapes differ");
    if (!(data_range > 0.0)) throw Error("ssim: data_range must be positive");
    if (h < detail::kSsimWindow || w < detail::kSsimWindow)
        throw DimensionError("ssim: images must be at least 11x11");

    const std::size_t n = a.size();
    std::vector<double> xa(n), xb(n), aa(n), bb(n), ab(n);
    for (std::size_t k = 0; k < n; ++k) {
        xa[k] = static_cast<double>(a[k]);
        xb[k] = static_cast<double>(b[k]);
        aa[k] = xa[k] * xa[k];
        bb[k] = xb[k] * xb[k];
        ab[k] = xa[k] * xb[k];
    }
    const auto g = detail::ssim_gaussian();
    const auto mu_a = detail::filter_valid(xa, h, w, g);
    const auto mu_b = detail::filter_valid(xb, h, w, g);
    const auto e_aa = detail::filter_valid(aa, h, w, g);
    const auto e_bb = detail::filter_valid(bb, h, w, g);
    const auto e_ab = detail::filter_valid(ab, h, w, g);

    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);
    double total = 0.0;
    for (std::size_t k = 0; k < mu_a.size(); ++k) {
        const double ma = mu_a[k], mb = mu_b[k];
        const double va = e_aa[k] - ma * ma;
        const double vb = e_bb[k] - mb * mb;
        const double cov = e_ab[k] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

inline double ssim(const ImageGrid& a, const ImageGrid& b, double data_range = 1.0)
{
    if (!a.same_shape(b)) throw DimensionError("ssim: image shapes differ");
    return ssim(a.values(), b.values(), a.height(), a.width(), data_range);
}

struct MetricRecord {
    std::string method;
    int num_views = 0;
    std::string sample_id;
    double psnr_db = 0.0;
    double ssim = 0.0;

    friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

inline constexpr const char* kMetricCsvHeader = "method,num_views,sample_id,psnr_db,ssim";

inline void write_metric_csv(std::ostream& out, const std::vector<MetricRecord>& records)
{
    out << kMetricCsvHeader << '\n';
    char buf[64];
    for (const auto& r : records) {
        out << r.method << ',' << r.num_views << ',' << r.sample_id << ',';
        std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.psnr_db, r.ssim);
        out << buf << '\n';
    }
}

inline std::vector<MetricRecord> read_metric_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kMetricCsvHeader)
        throw Error("metric CSV: expected header '" + std::string(kMetricCsvHeader) + "'");
    std::vector<MetricRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field[5];
        for (auto& f : field)
            if (!std::getline(ss, f, ',')) throw Error("metric CSV: short row at line " + std::to_string(lineno));
        try {
            records.push_back({field[0], std::stoi(field[1]), field[2], std::stod(field[3]), std::stod(field[4])});
        } catch (const std::exception&) {
            throw Error("metric CSV: bad number at line " + std::to_string(lineno));
        }
    }
    return records;
}

} // namespace fewview
