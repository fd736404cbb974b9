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

#ifndef PENDQ_CONFIG_HPP
#define PENDQ_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "pendq/rl.hpp"
#include "pendq/sysid.hpp"

namespace pendq {

/// Settings for the free-oscillation trace written by `oscillate`.
struct OscillationConfig {
    double theta0 = 0.1;
    double theta_dot0 = 0.0;
    double duration = 10.0;
    double sample_rate = 1000.0;
    double noise_std = 0.0;
    std::optional<int> counts_per_rev;
    std::uint64_t seed = 1;
};

struct FitSettings {
    int max_iterations = 20000;
    double tolerance = 1e-10;
    /// Priors for the initial guess; default to the configured I and b.
    std::optional<double> I0;
    std::optional<double> b0;
};

/**
 * Everything a command may need, read from a flat key=value file:
 *
 *   # pendulum
 *   m=0.05
 *   links=0.4,0.4
 *   kp=100
 *
 * Blank lines and text after '#' are ignored. Angles are radians except
 * keys ending in `_deg`.
 */
struct RunConfig {
    PendulumParams<double> params = PendulumParams<double>::defaults();
    std::vector<double> links{0.4, 0.4};
    /// One value applies to every task axis.
    std::vector<double> kp{100.0};
    std::vector<double> kd{20.0};
    /// Joint angles [rad]; the default posture when unset.
    std::optional<std::vector<double>> home;
    rl::LearningConfig learning;
    OscillationConfig oscillation;
    FitSettings fit;
    int eval_trials = 100;

    /// Apply one key=value pair; line is used for error messages.
    void set(const std::string& key, const std::string& value, std::size_t line = 0);
    /// Arm, gains and pendulum assembled and validated.
    rl::PlantConfig plant() const;
    void validate() const;
};

/// Parse config text on top of the defaults; throws ParseError on malformed
/// lines or unknown keys.
RunConfig parse_config(const std::string& text);

/// Apply "key=value" override strings in order.
void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides);

}  // namespace pendq

#endif  // PENDQ_CONFIG_HPP
