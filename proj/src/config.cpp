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

#include "pendq/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace pendq {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text, std::size_t line) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ParseError("'" + key + "' expects a number, got '" + text + "'", line);
    return value;
}

long long to_integer(const std::string& key, const std::string& text, std::size_t line) {
    long long value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw ParseError("'" + key + "' expects an integer, got '" + text + "'", line);
    return value;
}

int to_int(const std::string& key, const std::string& text, std::size_t line) {
    const long long v = to_integer(key, text, line);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ParseError("'" + key + "' is out of range", line);
    return static_cast<int>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text, std::size_t line) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item), line));
    if (out.empty()) throw ParseError("'" + key + "' expects a comma-separated list", line);
    return out;
}

TaskVector<double> expand_gain(const std::vector<double>& values, Eigen::Index dim, const char* name) {
    if (values.size() == 1) return TaskVector<double>::Constant(dim, values.front());
    if (static_cast<Eigen::Index>(values.size()) != dim)
        throw ValidationError(std::string(name) + " needs 1 or " + std::to_string(dim) + " values");
    return Eigen::Map<const Eigen::VectorXd>(values.data(), dim);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value, std::size_t line) {
    using Setter = std::function<void(const std::string&)>;
    auto num = [&](double& field) -> Setter {
        return [&, key](const std::string& v) { field = to_double(key, v, line); };
    };
    auto int_ = [&](int& field) -> Setter { return [&, key](const std::string& v) { field = to_int(key, v, line); }; };

    const std::map<std::string, Setter> setters = {
        {"I", num(params.I)},
        {"b", num(params.b)},
        {"m", num(params.m)},
        {"g", num(params.g)},
        {"l", num(params.l)},
        {"links", [&](const std::string& v) { links = to_list(key, v, line); }},
        {"kp", [&](const std::string& v) { kp = to_list(key, v, line); }},
        {"kd", [&](const std::string& v) { kd = to_list(key, v, line); }},
        {"q_home", [&](const std::string& v) { home = to_list(key, v, line); }},
        {"alpha", num(learning.alpha)},
        {"gamma", num(learning.gamma)},
        {"episodes", int_(learning.episodes)},
        {"h", num(learning.h)},
        {"max_steps", int_(learning.max_steps)},
        {"epsilon_start", num(learning.epsilon_start)},
        {"epsilon_end", num(learning.epsilon_end)},
        {"epsilon_decay_episodes", int_(learning.epsilon_decay_episodes)},
        {"param_noise_rel", num(learning.param_noise_rel)},
        {"error_noise", num(learning.error_noise)},
        {"tracking_mode", [&](const std::string& v) { learning.tracking_mode = rl::parse_tracking_mode(v); }},
        {"seed",
         [&](const std::string& v) {
             const long long s = to_integer(key, v, line);
             if (s < 0) throw ParseError("'seed' must be non-negative", line);
             learning.seed = static_cast<std::uint64_t>(s);
             oscillation.seed = learning.seed;
         }},
        {"phi0_max_deg", num(learning.phi0_max_deg)},
        {"eval_trials", int_(eval_trials)},
        {"theta0", num(oscillation.theta0)},
        {"theta_dot0", num(oscillation.theta_dot0)},
        {"duration", num(oscillation.duration)},
        {"sample_rate", num(oscillation.sample_rate)},
        {"noise_std", num(oscillation.noise_std)},
        {"counts_per_rev",
         [&](const std::string& v) {
             const int c = to_int(key, v, line);
             oscillation.counts_per_rev = c > 0 ? std::optional<int>(c) : std::nullopt;
         }},
        {"fit_max_iterations", int_(fit.max_iterations)},
        {"fit_tolerance", num(fit.tolerance)},
        {"fit_I0", [&](const std::string& v) { fit.I0 = to_double(key, v, line); }},
        {"fit_b0", [&](const std::string& v) { fit.b0 = to_double(key, v, line); }},
    };
    const auto it = setters.find(key);
    if (it == setters.end()) throw ParseError("unknown key '" + key + "'", line);
    it->second(value);
}

rl::PlantConfig RunConfig::plant() const {
    rl::PlantConfig plant;
    plant.params = params;
    plant.arm = ManipulatorModel<double>::planar(links);
    const Eigen::Index dim = plant.arm.task_dim();
    plant.gains = {expand_gain(kp, dim, "kp"), expand_gain(kd, dim, "kd")};
    if (home) {
        if (static_cast<Eigen::Index>(home->size()) != plant.arm.dof())
            throw ValidationError("q_home must list one angle per joint");
        plant.home = Eigen::Map<const Eigen::VectorXd>(home->data(), plant.arm.dof());
    } else {
        plant.home = default_home_posture<double>(plant.arm.dof());
    }
    plant.validate();
    return plant;
}

void RunConfig::validate() const {
    plant();
    learning.validate();
    if (eval_trials < 0) throw ValidationError("eval_trials must be non-negative");
    if (!(oscillation.duration > 0.0) || !std::isfinite(oscillation.duration))
        throw ValidationError("duration must be positive");
    if (!(oscillation.sample_rate > 0.0) || !std::isfinite(oscillation.sample_rate))
        throw ValidationError("sample_rate must be positive");
    if (!(oscillation.duration > 1.0 / oscillation.sample_rate))
        throw ValidationError("duration must exceed one sample interval");
    if (!(oscillation.noise_std >= 0.0)) throw ValidationError("noise_std must be non-negative");
    if (!std::isfinite(oscillation.theta0) || !std::isfinite(oscillation.theta_dot0))
        throw ValidationError("initial oscillation state must be finite");
    if (fit.max_iterations <= 0) throw ValidationError("fit_max_iterations must be positive");
    if (!(fit.tolerance > 0.0)) throw ValidationError("fit_tolerance must be positive");
    if (fit.I0 && !(*fit.I0 > 0.0)) throw ValidationError("fit_I0 must be positive");
    if (fit.b0 && !(*fit.b0 >= 0.0)) throw ValidationError("fit_b0 must be non-negative");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const std::string content = trim(raw.substr(0, raw.find('#')));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line);
        const std::string key = trim(content.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", line);
        cfg.set(key, trim(content.substr(eq + 1)), line);
    }
    return cfg;
}

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& overrides) {
    std::size_t index = 0;
    for (const std::string& item : overrides) {
        ++index;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("override '" + item + "' is not key=value", index);
        cfg.set(trim(item.substr(0, eq)), trim(item.substr(eq + 1)), index);
    }
}

}  // namespace pendq
