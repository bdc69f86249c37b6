#pragma once

// Few-view experiment driver: dense simulation, view sampling, prior sources,
// method comparison and result emission.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "fbp.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "phantom.hpp"
#include "png.hpp"
#include "projector.hpp"
#include "rls.hpp"

namespace fewview {

/// Keeps views floor(V / k) * j for j = 0..k-1.
inline Sinogram sample_views(const Sinogram& full, std::size_t k)
{
    const std::size_t total = full.num_views();
    if (k < 1 || k > total)
        throw Error("sample_views: k = " + std::to_string(k) + " outside [1, " + std::to_string(total) + "]");
    const std::size_t stride = total / k;
    std::vector<double> angles(k);
    std::vector<float> values(k * full.num_bins());
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t src = stride * j;
        angles[j] = full.angles_deg()[src];
        const auto view = full.view(src);
        std::copy(view.begin(), view.end(), values.begin() + static_cast<std::ptrdiff_t>(j * full.num_bins()));
    }
    return Sinogram(std::move(angles), full.num_bins(), std::move(values));
}

/// Separable Gaussian blur, kernel truncated at 4 sigma, mirrored borders.
inline ImageGrid gaussian_blur(const ImageGrid& img, double sigma)
{
    if (!(sigma > 0.0)) throw Error("gaussian_blur: sigma must be positive");
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        sum += kernel[k + radius];
    }
    for (double& v : kernel) v /= sum;

    const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
    auto mirror = [](long i, long n) {
        while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
        return i;
    };
    std::vector<double> tmp(img.size());
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += kernel[k + radius] * img(i, mirror(j + k, w));
            tmp[i * w + j] = s;
        }
    ImageGrid out(img.height(), img.width(), img.pixel_size());
    for (long i = 0; i < h; ++i)
        for (long j = 0; j < w; ++j) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += kernel[k + radius] * tmp[mirror(i + k, h) * w + j];
            out(i, j) = static_cast<float>(std::max(s, 0.0));
        }
    return out;
}

namespace prior {
struct Zero {};
struct Fbp {};
/// `<dir>/<sample_id>.json` in the image format.
struct FileDir {
    std::filesystem::path dir;
};
/// Test-only prior: the ground truth blurred with a Gaussian.
struct OracleBlur {
    double sigma = 2.0;
};
} // namespace prior

using PriorSource = std::variant<prior::Zero, prior::Fbp, prior::FileDir, prior::OracleBlur>;

inline std::string describe(const PriorSource& source)
{
    struct {
        std::string operator()(const prior::Zero&) const { return "zero"; }
        std::string operator()(const prior::Fbp&) const { return "fbp"; }
        std::string operator()(const prior::FileDir& f) const { return "dir:" + f.dir.string(); }
        std::string operator()(const prior::OracleBlur& o) const
        {
            std::ostringstream s;
            s << "oracle_blur:" << o.sigma;
            return s.str();
        }
    } visitor;
    return std::visit(visitor, source);
}

/// Parses "zero", "fbp", "dir:PATH" (or "file_dir:PATH") or "oracle_blur[:SIGMA]".
inline PriorSource parse_prior_source(const std::string& text)
{
    if (text == "zero") return prior::Zero{};
    if (text == "fbp") return prior::Fbp{};
    if (text.rfind("dir:", 0) == 0) return prior::FileDir{text.substr(4)};
    if (text.rfind("file_dir:", 0) == 0) return prior::FileDir{text.substr(9)};
    if (text == "oracle_blur") return prior::OracleBlur{};
    if (text.rfind("oracle_blur:", 0) == 0) {
        try {
            return prior::OracleBlur{std::stod(text.substr(12))};
        } catch (const std::exception&) {
        }
    }
    throw Error("unknown prior source '" + text + "'");
}

/// Starting image for the warm-started solver. Only the oracle source reads
/// `ground_truth`; the rest see nothing but the sampled sinogram.
inline ImageGrid make_prior(const PriorSource& source, const Sinogram& sino, const ProjectionGeometry& geom,
                            const std::string& sample_id, const ImageGrid* ground_truth = nullptr)
{
    const std::size_t n = geom.image_size;
    ImageGrid out;
    if (std::holds_alternative<prior::Zero>(source)) {
        out = ImageGrid(n, n, geom.pixel_size);
    } else if (std::holds_alternative<prior::Fbp>(source)) {
        out = fbp_reconstruct(sino, geom);
    } else if (const auto* dir = std::get_if<prior::FileDir>(&source)) {
        const auto path = dir->dir / (sample_id + ".json");
        if (!std::filesystem::exists(path)) throw Error("prior file '" + path.string() + "' not found");
        out = load_image(path);
    } else {
        const auto& blur = std::get<prior::OracleBlur>(source);
        if (!ground_truth) throw Error("oracle_blur prior requires the ground truth image");
        out = gaussian_blur(*ground_truth, blur.sigma);
    }
    geom.check_image(out);
    for (float v : out.values())
        if (v < 0.0f) throw Error("prior for '" + sample_id + "' has negative values");
    return out;
}

enum class Method { fbp, rls_cold, rls_warm };

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::fbp: return "fbp";
    case Method::rls_cold: return "rls_cold";
    case Method::rls_warm: return "rls_warm";
    }
    return "unknown";
}

inline Method parse_method(std::string_view name)
{
    if (name == "fbp") return Method::fbp;
    if (name == "rls_cold") return Method::rls_cold;
    if (name == "rls_warm") return Method::rls_warm;
    throw Error("unknown method '" + std::string(name) + "'");
}

struct Sample {
    std::string id;
    ImageGrid truth;
};

/// Loads every .png or image-sidecar .json in `dir` (sorted by name), rescales
/// to [0, 1] and block-mean downsamples to `size` x `size`.
inline std::vector<Sample> load_corpus(const std::filesystem::path& dir, std::size_t size)
{
    if (!std::filesystem::is_directory(dir)) throw Error("corpus directory '" + dir.string() + "' not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".png" || ext == ".json")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Sample> samples;
    for (const auto& f : files) {
        ImageGrid raw = f.extension() == ".png" ? read_png_gray(f) : load_image(f);
        if (raw.height() != raw.width() || raw.height() % size != 0)
            throw DimensionError("corpus image '" + f.string() + "' (" + std::to_string(raw.height()) + "x" +
                                 std::to_string(raw.width()) + ") cannot be reduced to " + std::to_string(size) +
                                 "x" + std::to_string(size));
        auto img = downsample(normalize_unit_range(raw), raw.height() / size);
        samples.push_back({f.stem().string(), ImageGrid(size, size, {img.values().begin(), img.values().end()})});
    }
    if (samples.empty()) throw Error("corpus directory '" + dir.string() + "' holds no images");
    return samples;
}

struct ExperimentConfig {
    std::vector<PhantomSpec> phantoms;
    std::optional<std::filesystem::path> corpus_dir;
    std::size_t image_size = 128;
    std::size_t dense_views = 180;
    std::vector<int> view_counts{3, 6, 9, 12, 15, 18};
    std::vector<Method> methods{Method::fbp, Method::rls_cold, Method::rls_warm};
    PriorSource prior = prior::Fbp{};
    ReconConfig recon;
    /// Empty: compute records only, write nothing.
    std::filesystem::path output_dir;
    bool write_images = true;
    unsigned threads = 1;

    void validate() const
    {
        if (phantoms.empty() && !corpus_dir) throw Error("experiment: no phantoms or corpus given");
        if (view_counts.empty()) throw Error("experiment: view_counts is empty");
        for (int k : view_counts)
            if (k < 1 || static_cast<std::size_t>(k) > dense_views || dense_views % static_cast<std::size_t>(k) != 0)
                throw Error("experiment: view count " + std::to_string(k) + " does not divide " +
                            std::to_string(dense_views));
        if (methods.empty()) throw Error("experiment: no methods selected");
        recon.validate();
    }
};

/// Per-solve diagnostics kept alongside the metric rows.
struct SolveSummary {
    std::string sample_id;
    int num_views = 0;
    std::string method;
    int iterations = 0;
    bool monotone = true;
    double max_relative_increase = 0.0;
    double min_iterate_value = 0.0;
    bool stalled = false;
};

struct ExperimentResult {
    std::vector<MetricRecord> records;
    std::vector<SolveSummary> solves;
};

inline std::vector<Sample> experiment_samples(const ExperimentConfig& cfg)
{
    std::vector<Sample> samples;
    for (const auto& spec : cfg.phantoms) {
        auto s = spec;
        s.size = cfg.image_size;
        samples.push_back({phantom_id(s), make_phantom(s)});
    }
    if (cfg.corpus_dir) {
        auto corpus = load_corpus(*cfg.corpus_dir, cfg.image_size);
        samples.insert(samples.end(), std::make_move_iterator(corpus.begin()), std::make_move_iterator(corpus.end()));
    }
    return samples;
}

namespace detail {

struct SampleOutcome {
    std::vector<MetricRecord> records;
    std::vector<SolveSummary> solves;
    std::vector<ImageGrid> images; // one per (views, method), same order as records
};

inline SampleOutcome run_sample(const Sample& sample, const ExperimentConfig& cfg)
{
    SampleOutcome out;
    const auto dense_geom = ProjectionGeometry::parallel(cfg.image_size, uniform_angles(cfg.dense_views));
    const Sinogram dense = forward_project(sample.truth, dense_geom);

    for (int k : cfg.view_counts) {
        const Sinogram sino = sample_views(dense, static_cast<std::size_t>(k));
        const auto geom = ProjectionGeometry::for_sinogram(sino);
        for (Method m : cfg.methods) {
            const std::string name(to_string(m));
            try {
                ImageGrid recon;
                if (m == Method::fbp) {
                    recon = fbp_reconstruct(sino, geom);
                } else {
                    const ImageGrid x0 = m == Method::rls_cold
                                             ? ImageGrid(cfg.image_size, cfg.image_size)
                                             : make_prior(cfg.prior, sino, geom, sample.id, &sample.truth);
                    auto report = rls_reconstruct(sino, geom, cfg.recon, x0);
                    out.solves.push_back({sample.id, k, name, report.iterations_run, report.monotone(),
                                          report.max_relative_increase(), report.min_iterate_value,
                                          report.stalled});
                    recon = std::move(report.final_image);
                }
                out.records.push_back(
                    {name, k, sample.id, psnr(recon, sample.truth, 1.0), ssim(recon, sample.truth, 1.0)});
                out.images.push_back(std::move(recon));
            } catch (const std::exception& e) {
                throw Error("sample '" + sample.id + "', " + std::to_string(k) + " views, method " + name + ": " +
                            e.what());
            }
        }
    }
    return out;
}

// Rows = samples (at most 8), columns = ground truth followed by each method.
inline ImageGrid montage(const std::vector<Sample>& samples, const std::vector<SampleOutcome>& outcomes,
                         std::size_t view_index, std::size_t num_methods, std::size_t size)
{
    const std::size_t rows = std::min<std::size_t>(samples.size(), 8), cols = num_methods + 1, gap = 2;
    ImageGrid canvas = ImageGrid::filled(rows * size + (rows - 1) * gap, cols * size + (cols - 1) * gap, 1.0f);
    auto blit = [&](const ImageGrid& img, std::size_t r, std::size_t c) {
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j)
                canvas(r * (size + gap) + i, c * (size + gap) + j) = std::clamp(img(i, j), 0.0f, 1.0f);
    };
    for (std::size_t r = 0; r < rows; ++r) {
        blit(samples[r].truth, r, 0);
        for (std::size_t m = 0; m < num_methods; ++m)
            blit(outcomes[r].images[view_index * num_methods + m], r, m + 1);
    }
    return canvas;
}

} // namespace detail

/// Runs every (sample, view count, method) case. Records come back ordered
/// by sample, then view count, then method, independent of thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    if (!cfg.output_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (ec || !std::filesystem::is_directory(cfg.output_dir))
            throw Error("cannot create output directory '" + cfg.output_dir.string() + "'");
        std::ofstream probe(cfg.output_dir / "metrics.csv", std::ios::trunc);
        if (!probe) throw Error("output directory '" + cfg.output_dir.string() + "' is not writable");
    }

    const auto samples = experiment_samples(cfg);
    std::vector<detail::SampleOutcome> outcomes(samples.size());
    std::vector<std::string> errors(samples.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < samples.size(); i = next++) {
            try {
                outcomes[i] = detail::run_sample(samples[i], cfg);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(samples.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw Error(e);

    ExperimentResult result;
    for (auto& o : outcomes) {
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        result.solves.insert(result.solves.end(), o.solves.begin(), o.solves.end());
    }

    if (!cfg.output_dir.empty()) {
        {
            std::ofstream csv(cfg.output_dir / "metrics.csv", std::ios::trunc);
            write_metric_csv(csv, result.records);
        }
        {
            std::ofstream csv(cfg.output_dir / "solver.csv", std::ios::trunc);
            csv << "sample_id,num_views,method,iterations,monotone,max_relative_increase,min_iterate_value,stalled\n";
            char buf[96];
            for (const auto& s : result.solves) {
                std::snprintf(buf, sizeof buf, "%d,%s,%.3e,%.6g,%d", s.iterations, s.monotone ? "1" : "0",
                              s.max_relative_increase, s.min_iterate_value, s.stalled ? 1 : 0);
                csv << s.sample_id << ',' << s.num_views << ',' << s.method << ',' << buf << '\n';
            }
        }
        if (cfg.write_images) {
            const auto recon_dir = cfg.output_dir / "recon";
            const auto montage_dir = cfg.output_dir / "montage";
            std::filesystem::create_directories(recon_dir);
            std::filesystem::create_directories(montage_dir);
            for (std::size_t s = 0; s < samples.size(); ++s) {
                save_image(recon_dir / (samples[s].id + "_truth"), samples[s].truth);
                for (std::size_t r = 0; r < outcomes[s].records.size(); ++r) {
                    const auto& rec = outcomes[s].records[r];
                    save_image(recon_dir / (rec.sample_id + "_v" + std::to_string(rec.num_views) + "_" + rec.method),
                               outcomes[s].images[r]);
                }
            }
            for (std::size_t v = 0; v < cfg.view_counts.size(); ++v)
                write_png_gray(montage_dir / ("views_" + std::to_string(cfg.view_counts[v]) + ".png"),
                               detail::montage(samples, outcomes, v, cfg.methods.size(), cfg.image_size));
        }
    }
    return result;
}

} // namespace fewview
