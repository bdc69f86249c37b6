// fewview: command-line driver for phantom generation, single reconstructions,
// few-view sweeps and result reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fewview/fewview.hpp>

namespace fs = std::filesystem;
using namespace fewview;

namespace {

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw Error("bad integer '" + item + "' in list '" + text + "'");
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct SampleOptions {
    std::string phantom = "random_ellipses";
    int count = 10;
    std::uint64_t seed = 0;
    std::size_t size = 128;
    std::string corpus;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--phantom", phantom, "shepp_logan, random_ellipses or uniform_disk")->capture_default_str();
        cmd->add_option("--count", count, "number of phantoms (seeds seed .. seed+count-1); 0 with --corpus")
            ->capture_default_str();
        cmd->add_option("--seed", seed, "first phantom seed")->capture_default_str();
        cmd->add_option("--size", size, "image edge length in pixels")->capture_default_str();
        cmd->add_option("--corpus", corpus, "directory of grayscale PNG or image-format slices");
    }

    std::vector<PhantomSpec> specs() const
    {
        const auto kind = parse_phantom_kind(phantom);
        std::vector<PhantomSpec> out;
        for (int i = 0; i < count; ++i) out.push_back({kind, seed + static_cast<std::uint64_t>(i), size});
        return out;
    }
};

struct SolverOptions {
    double beta = 2e-2;
    int iters = 100;
    double epsilon = 1e-3;
    double tolerance = 0.0;
    std::string step = "backtracking";
    bool allow_negative = false;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--beta", beta, "TV weight")->capture_default_str();
        cmd->add_option("--iters", iters, "iteration budget")->capture_default_str();
        cmd->add_option("--tv-epsilon", epsilon, "TV smoothing")->capture_default_str();
        cmd->add_option("--tolerance", tolerance, "relative objective change for early stop (0 = off)")
            ->capture_default_str();
        cmd->add_option("--step", step, "backtracking or fixed")->capture_default_str();
        cmd->add_flag("--allow-negative", allow_negative, "drop the non-negativity constraint");
    }

    ReconConfig config() const
    {
        ReconConfig cfg;
        cfg.beta = beta;
        cfg.max_iters = iters;
        cfg.tv_epsilon = epsilon;
        cfg.tolerance = tolerance;
        cfg.nonneg = !allow_negative;
        if (step == "fixed")
            cfg.step_policy = StepPolicy::fixed_from_op_norm;
        else if (step != "backtracking")
            throw Error("unknown step policy '" + step + "'");
        cfg.validate();
        return cfg;
    }
};

void print_summary(const std::vector<MetricRecord>& records)
{
    write_summary_table(std::cout, summarize(records));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Few-view parallel-beam CT reconstruction: FBP and TV-regularized least squares with warm start"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write ground-truth images with dense and few-view sinograms");
    SampleOptions gen_samples;
    gen_samples.attach(gen);
    std::string gen_views = "3,6,9,12,15,18";
    std::size_t gen_dense = 180;
    std::string gen_out;
    gen->add_option("--views", gen_views, "few-view counts to sample")->capture_default_str();
    gen->add_option("--dense-views", gen_dense, "views in the dense sinogram")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "reconstruct one sinogram");
    std::string rec_sino, rec_method = "rls", rec_prior, rec_out, rec_trace, rec_truth, rec_png;
    SolverOptions rec_solver;
    rec->add_option("--sino", rec_sino, "input sinogram (.json sidecar)")->required();
    rec->add_option("--method", rec_method, "fbp or rls")->capture_default_str();
    rec->add_option("--prior", rec_prior, "starting image for rls (default: zero image)");
    rec_solver.attach(rec);
    rec->add_option("--out", rec_out, "output image path")->required();
    rec->add_option("--trace", rec_trace, "write iter,objective,data_term CSV here");
    rec->add_option("--truth", rec_truth, "ground truth image; prints PSNR and SSIM");
    rec->add_option("--png", rec_png, "also write an 8-bit PNG preview");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run the full few-view comparison sweep");
    SampleOptions exp_samples;
    exp_samples.attach(exp);
    SolverOptions exp_solver;
    exp_solver.attach(exp);
    std::string exp_views = "3,6,9,12,15,18", exp_methods = "fbp,rls_cold,rls_warm", exp_prior = "fbp", exp_out;
    unsigned exp_threads = 1;
    bool exp_no_images = false;
    exp->add_option("--views", exp_views, "few-view counts")->capture_default_str();
    exp->add_option("--methods", exp_methods, "subset of fbp,rls_cold,rls_warm")->capture_default_str();
    exp->add_option("--prior", exp_prior, "rls_warm prior: zero, fbp, dir:PATH or oracle_blur[:SIGMA]")
        ->capture_default_str();
    exp->add_option("--threads", exp_threads, "worker threads over samples")->capture_default_str();
    exp->add_flag("--no-images", exp_no_images, "skip reconstructed images and montages");
    exp->add_option("--out", exp_out, "output directory")->required();

    // report
    auto* rep = app.add_subcommand("report", "summarize a metrics CSV and plot PSNR/SSIM against views");
    std::string rep_csv, rep_out;
    rep->add_option("--csv", rep_csv, "metrics.csv from an experiment")->required();
    rep->add_option("--out", rep_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            std::vector<Sample> samples;
            if (gen_samples.corpus.empty()) {
                for (const auto& spec : gen_samples.specs()) samples.push_back({phantom_id(spec), make_phantom(spec)});
            } else {
                samples = load_corpus(gen_samples.corpus, gen_samples.size);
            }
            const auto views = parse_int_list(gen_views);
            const fs::path out(gen_out);
            fs::create_directories(out / "images");
            fs::create_directories(out / "sinograms" / "dense");
            for (int k : views) fs::create_directories(out / "sinograms" / ("v" + std::to_string(k)));
            for (const auto& s : samples) {
                const auto geom = ProjectionGeometry::parallel(s.truth.height(), uniform_angles(gen_dense));
                const auto dense = forward_project(s.truth, geom);
                save_image(out / "images" / s.id, s.truth);
                save_sinogram(out / "sinograms" / "dense" / s.id, dense);
                for (int k : views)
                    save_sinogram(out / "sinograms" / ("v" + std::to_string(k)) / s.id,
                                  sample_views(dense, static_cast<std::size_t>(k)));
            }
            std::cout << "wrote " << samples.size() << " samples to " << out << '\n';
        } else if (*rec) {
            const auto sino = load_sinogram(rec_sino);
            const auto geom = ProjectionGeometry::for_sinogram(sino);
            ImageGrid result;
            if (rec_method == "fbp") {
                result = fbp_reconstruct(sino, geom);
            } else if (rec_method == "rls") {
                const ImageGrid x0 = rec_prior.empty() ? ImageGrid(geom.image_size, geom.image_size)
                                                       : load_image(rec_prior);
                const auto report = rls_reconstruct(sino, geom, rec_solver.config(), x0);
                std::cout << "iterations " << report.iterations_run << ", objective "
                          << report.objective_trace.front() << " -> " << report.objective_trace.back() << '\n';
                if (!rec_trace.empty()) {
                    std::ofstream trace(rec_trace);
                    if (!trace) throw Error("cannot write '" + rec_trace + "'");
                    report.write_trace_csv(trace);
                }
                result = report.final_image;
            } else {
                throw Error("unknown method '" + rec_method + "'");
            }
            save_image(rec_out, result);
            if (!rec_png.empty()) write_png_gray(rec_png, result);
            if (!rec_truth.empty()) {
                const auto truth = load_image(rec_truth);
                std::cout << "psnr_db " << psnr(result, truth) << " ssim " << ssim(result, truth) << '\n';
            }
        } else if (*exp) {
            ExperimentConfig cfg;
            if (exp_samples.corpus.empty() || exp_samples.count > 0) cfg.phantoms = exp_samples.specs();
            if (!exp_samples.corpus.empty()) cfg.corpus_dir = exp_samples.corpus;
            cfg.image_size = exp_samples.size;
            cfg.view_counts = parse_int_list(exp_views);
            cfg.methods.clear();
            for (const auto& m : split(exp_methods)) cfg.methods.push_back(parse_method(m));
            cfg.prior = parse_prior_source(exp_prior);
            cfg.recon = exp_solver.config();
            cfg.output_dir = exp_out;
            cfg.threads = exp_threads;
            cfg.write_images = !exp_no_images;
            const auto result = run_experiment(cfg);
            print_summary(result.records);
            std::cout << "wrote " << result.records.size() << " rows to " << (fs::path(exp_out) / "metrics.csv")
                      << '\n';
        } else if (*rep) {
            std::ifstream in(rep_csv);
            if (!in) throw Error("cannot open '" + rep_csv + "'");
            const auto records = read_metric_csv(in);
            write_summary_table(std::cout, write_report(records, rep_out));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
