#pragma once

// Regularized least squares with TV:
//
//     minimize  ||y - A x||^2 + beta * TV_eps(x)   subject to x >= 0 (optional)
//
// solved by projected gradient descent from a caller-supplied starting image.
// With the backtracking policy every accepted iterate satisfies the
// sufficient-decrease test, so the objective trace never increases.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "grid.hpp"
#include "projector.hpp"
#include "tv.hpp"

namespace fewview {

enum class StepPolicy { fixed_from_op_norm, backtracking };

struct ReconConfig {
    double beta = 2e-2;
    int max_iters = 100;
    double tv_epsilon = 1e-3;
    StepPolicy step_policy = StepPolicy::backtracking;
    bool nonneg = true;
    /// Early stop when |f_k - f_{k+1}| <= tolerance * |f_k|; 0 runs the full budget.
    double tolerance = 0.0;
    /// Trial step for iteration k+1 is this multiple of the step accepted at k.
    double step_growth = 2.0;
    int max_backtracks = 60;
    int op_norm_iters = 30;

    void validate() const
    {
        if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error("ReconConfig: beta must be >= 0");
        if (max_iters < 1) throw Error("ReconConfig: max_iters must be >= 1");
        if (!(tv_epsilon > 0.0)) throw Error("ReconConfig: tv_epsilon must be > 0");
        if (!(tolerance >= 0.0)) throw Error("ReconConfig: tolerance must be >= 0");
        if (!(step_growth >= 1.0)) throw Error("ReconConfig: step_growth must be >= 1");
        if (max_backtracks < 1 || op_norm_iters < 1) throw Error("ReconConfig: iteration limits must be >= 1");
    }
};

struct SolveReport {
    /// Entry 0 is the objective at the starting image; entry k follows iteration k.
    std::vector<double> objective_trace;
    std::vector<double> data_term_trace;
    int iterations_run = 0;
    /// True when the line search could not find a decreasing step.
    bool stalled = false;
    /// Smallest pixel value over every iterate, including the start.
    double min_iterate_value = 0.0;
    ImageGrid final_image;

    /// Largest f_{k+1} - f_k relative to |f_k|; <= 0 for a monotone trace.
    double max_relative_increase() const
    {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < objective_trace.size(); ++k) {
            const double denom = std::max(std::abs(objective_trace[k - 1]), std::numeric_limits<double>::min());
            worst = std::max(worst, (objective_trace[k] - objective_trace[k - 1]) / denom);
        }
        return objective_trace.size() < 2 ? 0.0 : worst;
    }

    bool monotone(double relative_slack = 1e-9) const
    {
        for (std::size_t k = 1; k < objective_trace.size(); ++k)
            if (objective_trace[k] > objective_trace[k - 1] + relative_slack * std::abs(objective_trace[k - 1]))
                return false;
        return true;
    }

    void write_trace_csv(std::ostream& out) const
    {
        out << "iter,objective,data_term\n";
        char line[128];
        for (std::size_t k = 0; k < objective_trace.size(); ++k) {
            std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", k, objective_trace[k], data_term_trace[k]);
            out << line;
        }
    }
};

namespace detail {

// Evaluates ||y - A x||^2, keeping the residual A x - y.
inline double data_term(const ParallelProjector& proj, std::span<const double> x, std::span<const float> y,
                        std::vector<double>& residual)
{
    proj.forward(x, std::span<double>(residual));
    double s = 0.0;
    for (std::size_t k = 0; k < residual.size(); ++k) {
        residual[k] -= static_cast<double>(y[k]);
        s += residual[k] * residual[k];
    }
    return s;
}

} // namespace detail

/// ||y - A x||^2 + beta * TV_eps(x), the exact quantity the solver minimizes.
inline double objective(const ImageGrid& img, const Sinogram& sino, const ProjectionGeometry& geom, double beta,
                        double epsilon)
{
    geom.check_image(img);
    geom.check_sinogram(sino);
    ParallelProjector proj(geom);
    std::vector<double> x(img.values().begin(), img.values().end());
    std::vector<double> residual(geom.sinogram_values());
    const double data = detail::data_term(proj, x, sino.values(), residual);
    return data + beta * tv_value(std::span<const double>(x), img.height(), img.width(), epsilon);
}

inline SolveReport rls_reconstruct(const Sinogram& sino, const ProjectionGeometry& geom, const ReconConfig& cfg,
                                   const ImageGrid& x0)
{
    cfg.validate();
    geom.check_sinogram(sino);
    geom.check_image(x0);
    if (cfg.nonneg && x0.min_value() < 0.0f) throw Error("rls_reconstruct: starting image has negative values");

    const ParallelProjector proj(geom);
    const std::size_t n = geom.image_size;
    const std::size_t npix = geom.image_pixels();
    const auto y = sino.values();

    std::vector<double> x(x0.values().begin(), x0.values().end());
    std::vector<double> trial(npix), grad(npix), tv_grad(npix), back(npix);
    std::vector<double> residual(geom.sinogram_values()), trial_residual(geom.sinogram_values());

    auto check_finite = [](double f) {
        if (!std::isfinite(f)) throw Error("rls_reconstruct: objective is not finite");
        return f;
    };

    // f(x), with residual and gradient at x.
    double data = detail::data_term(proj, x, y, residual);
    double tv = tv_value_grad(std::span<const double>(x), n, n, cfg.tv_epsilon, std::span<double>(tv_grad));
    double f = check_finite(data + cfg.beta * tv);
    auto refresh_gradient = [&] {
        proj.adjoint(std::span<const double>(residual), std::span<double>(back));
        for (std::size_t k = 0; k < npix; ++k) grad[k] = 2.0 * back[k] + cfg.beta * tv_grad[k];
    };
    refresh_gradient();

    const double norm = op_norm_estimate(geom, cfg.op_norm_iters);
    double lipschitz = 2.0 * norm * norm + cfg.beta * 8.0 / cfg.tv_epsilon;
    if (cfg.step_policy == StepPolicy::fixed_from_op_norm) lipschitz *= 1.1; // power iteration underestimates
    const double base_step = 1.0 / lipschitz;

    SolveReport report;
    report.objective_trace.push_back(f);
    report.data_term_trace.push_back(data);
    double min_seen = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());

    double step = base_step;
    for (int it = 0; it < cfg.max_iters; ++it) {
        bool accepted = false;
        double trial_f = 0.0, trial_data = 0.0;
        const int attempts = cfg.step_policy == StepPolicy::backtracking ? cfg.max_backtracks : 1;
        for (int attempt = 0; attempt < attempts; ++attempt) {
            double lin = 0.0, sq = 0.0;
            for (std::size_t k = 0; k < npix; ++k) {
                double v = x[k] - step * grad[k];
                if (cfg.nonneg && v < 0.0) v = 0.0;
                trial[k] = v;
                const double d = v - x[k];
                lin += grad[k] * d;
                sq += d * d;
            }
            if (sq == 0.0) break; // stationary
            trial_data = detail::data_term(proj, trial, y, trial_residual);
            trial_f = trial_data + cfg.beta * tv_value(std::span<const double>(trial), n, n, cfg.tv_epsilon);
            if (!std::isfinite(trial_f) && cfg.step_policy == StepPolicy::fixed_from_op_norm) check_finite(trial_f);
            const bool sufficient = trial_f <= f + lin + sq / (2.0 * step);
            if (std::isfinite(trial_f) && trial_f <= f && (sufficient || cfg.step_policy != StepPolicy::backtracking)) {
                accepted = true;
                break;
            }
            if (cfg.step_policy == StepPolicy::backtracking) step *= 0.5;
        }
        if (!accepted) {
            report.stalled = true;
            break;
        }

        x.swap(trial);
        residual.swap(trial_residual);
        const double previous = f;
        data = trial_data;
        tv = tv_value_grad(std::span<const double>(x), n, n, cfg.tv_epsilon, std::span<double>(tv_grad));
        f = check_finite(data + cfg.beta * tv);
        refresh_gradient();
        min_seen = std::min(min_seen, *std::min_element(x.begin(), x.end()));

        report.objective_trace.push_back(f);
        report.data_term_trace.push_back(data);
        report.iterations_run = it + 1;

        if (cfg.step_policy == StepPolicy::backtracking) step *= cfg.step_growth;
        if (cfg.tolerance > 0.0 && std::abs(previous - f) <= cfg.tolerance * std::abs(previous)) break;
    }

    report.min_iterate_value = min_seen;
    report.final_image = ImageGrid(n, n, geom.pixel_size);
    for (std::size_t k = 0; k < npix; ++k) report.final_image.values()[k] = static_cast<float>(x[k]);
    return report;
}

} // namespace fewview
