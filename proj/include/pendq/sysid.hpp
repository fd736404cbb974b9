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

#ifndef PENDQ_SYSID_HPP
#define PENDQ_SYSID_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pendq/dynamics.hpp"

namespace pendq::sysid {

using Sample = OscillationSample<double>;

/// Constants held fixed during identification. Only mgl enters the
/// free-oscillation model, so m, g and l are not separately identifiable.
struct FixedConstants {
    double m;
    double g;
    double l;

    static FixedConstants from(const PendulumParams<double>& p) { return {p.m, p.g, p.l}; }
    double mgl() const { return m * g * l; }
};

/// Free quantities of a fit: inertia, damping and the unknown release state.
struct Candidate {
    double I;
    double b;
    double theta0;
    double theta_dot0;
};

struct FitConfig {
    Candidate initial_guess;
    int max_iterations = 20000;
    double tolerance = 1e-10;
    /// RK4 step; when unset, min(data spacing, period / 100) at the initial guess.
    std::optional<double> h;

    void validate() const;
};

struct FitResult {
    PendulumParams<double> params;
    double theta0 = 0.0;
    double theta_dot0 = 0.0;
    double rss = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// theta_sim(t_i) - theta_i, with theta_sim the RK4 solution started at t = 0
/// and linearly interpolated to each sample time.
std::vector<double> residuals(const Candidate& candidate, std::span<const Sample> data, const FixedConstants& fixed,
                              double h);

double residual_sum_of_squares(const Candidate& candidate, std::span<const Sample> data, const FixedConstants& fixed,
                               double h);

/// Integrator step used when FitConfig::h is unset.
double default_fit_step(std::span<const Sample> data, const Candidate& guess, const FixedConstants& fixed);

/**
 * Least-squares estimate of I, b and the initial state from a free
 * oscillation trace, by Nelder-Mead over (log I, b, theta0, theta_dot0).
 *
 * Fewer than 50 samples, or a trace shorter than two periods, yields a
 * warning in the result. A trace without any motion throws
 * DegenerateDataError.
 */
FitResult fit_parameters(std::span<const Sample> data, const FixedConstants& fixed, const FitConfig& cfg);

/// Initial guess built from prior I and b and the first two samples.
Candidate guess_from_data(std::span<const Sample> data, double I, double b);

struct EncoderOptions {
    double duration = 5.0;
    double sample_rate = 200.0;
    double noise_std = 0.0;
    /// Quantize to multiples of 2 pi / counts_per_rev when set.
    std::optional<int> counts_per_rev;
    std::uint64_t seed = 1;
};

/// RK4 trace sampled at sample_rate, with optional Gaussian noise and
/// encoder quantization applied in that order.
std::vector<Sample> generate_synthetic_encoder_data(const PendulumParams<double>& p, double theta0, double theta_dot0,
                                                    const EncoderOptions& opts);

/// Times where theta crosses level, linearly interpolated between samples.
std::vector<double> crossing_times(std::span<const Sample> data, double level);

/// Twice the mean spacing of successive crossings of level; nullopt with
/// fewer than two crossings.
std::optional<double> period_from_crossings(std::span<const Sample> data, double level);

}  // namespace pendq::sysid

#endif  // PENDQ_SYSID_HPP
