/*
 Copyright 2026 The pendq Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "pendq/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pendq/nelder_mead.hpp"

namespace pendq::sysid {

namespace {

PendulumParams<double> params_of(const Candidate& c, const FixedConstants& fixed) {
    return {c.I, c.b, fixed.m, fixed.g, fixed.l};
}

void check_trace(std::span<const Sample> data) {
    if (data.empty()) throw ValidationError("oscillation trace is empty");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!std::isfinite(data[i].t) || !std::isfinite(data[i].theta) || data[i].t < 0.0)
            throw ValidationError("oscillation trace: sample " + std::to_string(i) + " is not finite or has t < 0");
        if (i > 0 && !(data[i].t > data[i - 1].t))
            throw ValidationError("oscillation trace: times must be strictly increasing");
    }
}

double min_spacing(std::span<const Sample> data) {
    double spacing = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < data.size(); ++i) spacing = std::min(spacing, data[i].t - data[i - 1].t);
    return spacing;
}

// Optimizer coordinates: log(I / I_ref), b / I_ref [1/s], theta0, theta_dot0.
// Scaling by the reference inertia keeps the search identical when I, b and
// mgl are all rescaled together.
struct Coordinates {
    double i_ref;

    Eigen::VectorXd to(const Candidate& c) const {
        Eigen::VectorXd z(4);
        z << std::log(c.I / i_ref), c.b / i_ref, c.theta0, c.theta_dot0;
        return z;
    }
    Candidate from(const Eigen::VectorXd& z) const { return {i_ref * std::exp(z(0)), i_ref * z(1), z(2), z(3)}; }
};

}  // namespace

void FitConfig::validate() const {
    if (!(tolerance > 0.0)) throw ValidationError("fit tolerance must be positive");
    if (max_iterations <= 0) throw ValidationError("fit max_iterations must be positive");
    if (!(initial_guess.I > 0.0) || !(initial_guess.b >= 0.0) || !std::isfinite(initial_guess.theta0) ||
        !std::isfinite(initial_guess.theta_dot0))
        throw ValidationError("fit initial guess requires I > 0, b >= 0 and a finite initial state");
    if (h && !(*h > 0.0)) throw ValidationError("fit step must be positive");
}

std::vector<double> residuals(const Candidate& candidate, std::span<const Sample> data, const FixedConstants& fixed,
                              double h) {
    if (!(candidate.I > 0.0) || !(candidate.b >= 0.0))
        throw ModelDomainError("residuals: candidate requires I > 0 and b >= 0");
    if (!(h > 0.0)) throw ValidationError("residuals: step must be positive");
    check_trace(data);
    const PendulumParams<double> p = params_of(candidate, fixed);

    std::vector<double> out;
    out.reserve(data.size());
    Eigen::Vector2d y(candidate.theta0, candidate.theta_dot0);
    Eigen::Vector2d y_next = rk4_free_oscillation_step(y, p, h);
    std::size_t k = 0;  // current interval [k h, (k + 1) h]
    for (const Sample& s : data) {
        while (s.t > (k + 1) * h) {
            y = y_next;
            y_next = rk4_free_oscillation_step(y, p, h);
            ++k;
        }
        const double w = (s.t - k * h) / h;
        const double theta_sim = w == 0.0 ? y(0) : (1.0 - w) * y(0) + w * y_next(0);
        out.push_back(theta_sim - s.theta);
    }
    return out;
}

double residual_sum_of_squares(const Candidate& candidate, std::span<const Sample> data, const FixedConstants& fixed,
                               double h) {
    double rss = 0.0;
    for (double r : residuals(candidate, data, fixed, h)) rss += r * r;
    return rss;
}

double default_fit_step(std::span<const Sample> data, const Candidate& guess, const FixedConstants& fixed) {
    const double period = natural_period(params_of(guess, fixed));
    const double spacing = data.size() > 1 ? min_spacing(data) : period / 100.0;
    return std::min(spacing, period / 100.0);
}

Candidate guess_from_data(std::span<const Sample> data, double I, double b) {
    check_trace(data);
    Candidate c{I, b, data[0].theta, 0.0};
    if (data.size() > 1) c.theta_dot0 = (data[1].theta - data[0].theta) / (data[1].t - data[0].t);
    return c;
}

FitResult fit_parameters(std::span<const Sample> data, const FixedConstants& fixed, const FitConfig& cfg) {
    cfg.validate();
    check_trace(data);
    if (!(fixed.m > 0.0) || !(fixed.g > 0.0) || !(fixed.l > 0.0))
        throw ValidationError("fixed constants m, g, l must be positive");

    const auto [lo, hi] = std::minmax_element(data.begin(), data.end(),
                                              [](const Sample& a, const Sample& b) { return a.theta < b.theta; });
    if (!(hi->theta - lo->theta > 1e-12)) throw DegenerateDataError("oscillation trace has constant theta");

    FitResult result;
    const double period = natural_period(params_of(cfg.initial_guess, fixed));
    if (data.size() < 50) result.warnings.push_back("fewer than 50 samples; convergence is not guaranteed");
    if (data.back().t - data.front().t < 2.0 * period)
        result.warnings.push_back("trace spans fewer than two oscillation periods; convergence is not guaranteed");

    const double h = cfg.h.value_or(default_fit_step(data, cfg.initial_guess, fixed));
    const Coordinates coords{cfg.initial_guess.I};
    auto objective = [&](const Eigen::VectorXd& z) {
        const Candidate c = coords.from(z);
        if (!(c.b >= 0.0) || !(c.I > 0.0)) return std::numeric_limits<double>::infinity();
        return residual_sum_of_squares(c, data, fixed, h);
    };

    SimplexOptions<double> opts;
    opts.tolerance = cfg.tolerance;
    opts.initial_step.resize(4);
    opts.initial_step << 0.1, std::max(0.2 * cfg.initial_guess.b / cfg.initial_guess.I, 0.02), 0.05, 0.1;

    // Nelder-Mead can collapse onto a non-stationary point; restart from the
    // best vertex until a restart no longer moves it.
    Eigen::VectorXd z = coords.to(cfg.initial_guess);
    double best = objective(z);
    int budget = cfg.max_iterations;
    bool converged = false;
    while (budget > 0) {
        opts.max_iterations = budget;
        const SimplexResult<double> run = nelder_mead(objective, z, opts);
        budget -= run.iterations;
        result.iterations += run.iterations;
        converged = run.converged;
        const bool moved = (run.x - z).cwiseAbs().maxCoeff() > cfg.tolerance;
        if (run.value <= best) {
            z = run.x;
            best = run.value;
        }
        if (!converged || !moved) break;
        // shrink the restart simplex so repeated restarts do not wander
        opts.initial_step *= 0.5;
    }

    const Candidate fitted = coords.from(z);
    result.params = params_of(fitted, fixed);
    result.theta0 = fitted.theta0;
    result.theta_dot0 = fitted.theta_dot0;
    result.rss = best;
    result.converged = converged;
    return result;
}

std::vector<Sample> generate_synthetic_encoder_data(const PendulumParams<double>& p, double theta0, double theta_dot0,
                                                    const EncoderOptions& opts) {
    p.validate();
    if (!(opts.sample_rate > 0.0)) throw ValidationError("sample_rate must be positive");
    if (!(opts.duration > 0.0)) throw ValidationError("duration must be positive");
    if (!(opts.noise_std >= 0.0)) throw ValidationError("noise_std must be non-negative");
    if (opts.counts_per_rev && *opts.counts_per_rev <= 0) throw ValidationError("counts_per_rev must be positive");

    const double dt = 1.0 / opts.sample_rate;
    // integrate finer than the sampling interval when it is coarse
    const int substeps = std::max(1, static_cast<int>(std::ceil(dt / (natural_period(p) / 100.0) - 1e-9)));
    const double h = dt / substeps;
    const std::size_t n = trace_length(opts.duration, dt);

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> noise(0.0, opts.noise_std > 0.0 ? opts.noise_std : 1.0);
    const double quantum = opts.counts_per_rev ? 2.0 * std::numbers::pi / *opts.counts_per_rev : 0.0;

    std::vector<Sample> out;
    out.reserve(n);
    Eigen::Vector2d y(theta0, theta_dot0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            for (int k = 0; k < substeps; ++k) y = rk4_free_oscillation_step(y, p, h);
        double theta = y(0);
        if (opts.noise_std > 0.0) theta += noise(rng);
        if (quantum > 0.0) theta = std::round(theta / quantum) * quantum;
        out.push_back({static_cast<double>(i) * dt, theta});
    }
    return out;
}

std::vector<double> crossing_times(std::span<const Sample> data, double level) {
    std::vector<double> times;
    for (std::size_t i = 1; i < data.size(); ++i) {
        const double a = data[i - 1].theta - level, b = data[i].theta - level;
        if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
            const double w = a / (a - b);
            times.push_back(data[i - 1].t + w * (data[i].t - data[i - 1].t));
        }
    }
    return times;
}

std::optional<double> period_from_crossings(std::span<const Sample> data, double level) {
    const std::vector<double> times = crossing_times(data, level);
    if (times.size() < 2) return std::nullopt;
    return 2.0 * (times.back() - times.front()) / static_cast<double>(times.size() - 1);
}

}  // namespace pendq::sysid
