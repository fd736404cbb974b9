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

#include "pendq/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pendq::rl {

namespace {

// Bin edges; angles in radians converted from the degree values once.
const double kPhi1 = deg_to_rad(1.0);
const double kPhi5 = deg_to_rad(5.0);
const double kPhiDot10 = deg_to_rad(10.0);
const double kPhiDot50 = deg_to_rad(50.0);
constexpr double kX8 = 0.08;
constexpr double kXDot5 = 0.5;

// ]-11,-5[ [-5,-1[ [-1,0[ [0,1[ [1,5[ [5,11[ ; the outer limits are failures
int phi_bin(double phi) {
    if (phi < -kPhi5) return 0;
    if (phi < -kPhi1) return 1;
    if (phi < 0.0) return 2;
    if (phi < kPhi1) return 3;
    if (phi < kPhi5) return 4;
    return 5;
}

// ]-inf,-50] ]-50,-10] ]-10,10[ [10,50[ [50,inf[
int phidot_bin(double phi_dot) {
    if (phi_dot <= -kPhiDot50) return 0;
    if (phi_dot <= -kPhiDot10) return 1;
    if (phi_dot < kPhiDot10) return 2;
    if (phi_dot < kPhiDot50) return 3;
    return 4;
}

// ]-0.22,-0.08] ]-0.08,0.08[ [0.08,0.22[
int x_bin(double x) {
    if (x <= -kX8) return 0;
    if (x < kX8) return 1;
    return 2;
}

// ]-inf,-0.5] ]-0.5,0.5[ [0.5,inf[
int xdot_bin(double x_dot) {
    if (x_dot <= -kXDot5) return 0;
    if (x_dot < kXDot5) return 1;
    return 2;
}

}  // namespace

DiscreteState DiscreteState::from_index(int index) {
    if (index < 0 || index >= kStateCount) throw ContractError("DiscreteState: index out of range");
    DiscreteState s;
    s.xdot_bin = index % kXDotBins;
    index /= kXDotBins;
    s.x_bin = index % kXBins;
    index /= kXBins;
    s.phidot_bin = index % kPhiDotBins;
    s.phi_bin = index / kPhiDotBins;
    return s;
}

bool DiscreteState::valid() const {
    return phi_bin >= 0 && phi_bin < kPhiBins && phidot_bin >= 0 && phidot_bin < kPhiDotBins && x_bin >= 0 &&
           x_bin < kXBins && xdot_bin >= 0 && xdot_bin < kXDotBins;
}

ActionId::ActionId(int index) : index_(index) {
    if (index < 0 || index >= kActionCount) throw ContractError("ActionId: index out of range");
}

Observation discretize(const ContinuousState<double>& s) {
    if (is_failure(s) || !s.allFinite()) return Failure{};
    return DiscreteState{phi_bin(s(kPhi)), phidot_bin(s(kPhiDot)), x_bin(s(kX)), xdot_bin(s(kXDot))};
}

ActionId QTable::greedy_action(const DiscreteState& s) const {
    Eigen::Index best = 0;
    values_.row(s.index()).maxCoeff(&best);  // first maximizer
    return ActionId(static_cast<int>(best));
}

void q_update(QTable& table, const DiscreteState& s, ActionId a, double r, const Observation& s_next,
              double alpha, double gamma) {
    const double next_max = s_next.is_failure() ? 0.0 : table.max_value(s_next.state());
    double& q = table(s, a);
    q = q_learning_target_blend(q, r, next_max, alpha, gamma);
}

ActionId select_action(const QTable& table, const DiscreteState& s, double epsilon, std::mt19937_64& rng) {
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng) < epsilon) {
            std::uniform_int_distribution<int> pick(0, kActionCount - 1);
            return ActionId(pick(rng));
        }
    }
    return table.greedy_action(s);
}

std::string to_string(TrackingMode mode) { return mode == TrackingMode::Ideal ? "ideal" : "clik"; }

TrackingMode parse_tracking_mode(const std::string& text) {
    if (text == "ideal") return TrackingMode::Ideal;
    if (text == "clik") return TrackingMode::Clik;
    throw ValidationError("tracking_mode must be 'ideal' or 'clik', got '" + text + "'");
}

std::string to_string(TerminalReason reason) {
    switch (reason) {
        case TerminalReason::Failure: return "failure";
        case TerminalReason::Timeout: return "timeout";
        case TerminalReason::Singularity: return "singularity";
    }
    return "unknown";
}

void LearningConfig::validate() const {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ValidationError(msg);
    };
    require(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    require(gamma >= 0.0 && gamma < 1.0, "gamma must lie in [0, 1)");
    require(episodes > 0, "episodes must be positive");
    require(std::isfinite(h) && h > 0.0, "h must be positive");
    require(max_steps >= 0, "max_steps must be non-negative");
    require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start must lie in [0, 1]");
    require(epsilon_end >= 0.0 && epsilon_end <= 1.0, "epsilon_end must lie in [0, 1]");
    require(epsilon_decay_episodes >= 0, "epsilon_decay_episodes must be non-negative");
    require(std::isfinite(param_noise_rel) && param_noise_rel >= 0.0, "param_noise_rel must be non-negative");
    require(std::isfinite(error_noise) && error_noise >= 0.0, "error_noise must be non-negative");
    require(phi0_max_deg >= 0.0 && phi0_max_deg < kPhiLimitDeg, "phi0_max_deg must lie in [0, 11)");
}

double LearningConfig::epsilon_at(int episode) const {
    if (epsilon_decay_episodes <= 0 || episode >= epsilon_decay_episodes) return epsilon_end;
    const double frac = static_cast<double>(episode) / epsilon_decay_episodes;
    return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

void PlantConfig::validate() const {
    params.validate();
    arm.validate();
    gains.validate();
    if (gains.kp.size() != arm.task_dim()) throw ValidationError("gains must match the arm task dimension");
    if (home.size() != arm.dof()) throw ValidationError("home posture must match the arm joint count");
}

Environment::Environment(const PlantConfig& plant, const LearningConfig& cfg, std::mt19937_64& rng)
    : cfg_(cfg), params_(plant.params), gains_(plant.gains) {
    if (cfg.param_noise_rel > 0.0) {
        std::normal_distribution<double> log_scale(0.0, cfg.param_noise_rel);
        params_.I *= std::exp(log_scale(rng));
        params_.b *= std::exp(log_scale(rng));
    }
    const double phi_max = deg_to_rad(cfg.phi0_max_deg);
    std::uniform_real_distribution<double> phi0(-phi_max, phi_max);
    state_ = make_state(0.0, 0.0, phi0(rng), 0.0);
    if (cfg.tracking_mode == TrackingMode::Clik) channel_.emplace(plant.arm, plant.gains, plant.home, cfg.h);
}

Environment::Step Environment::step(ActionId a, std::mt19937_64& rng) {
    const double u_cmd = a.accel();
    double u_actual = u_cmd;
    if (channel_) {
        u_actual = channel_->step(u_cmd, cfg_.error_noise, rng);
    } else if (cfg_.error_noise > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg_.error_noise);
        TrackingError<double> err = TrackingError<double>::zero(gains_.kp.size());
        err.e(0) = noise(rng);
        err.e_dot(0) = noise(rng);
        u_actual = ideal_tracking_accel(u_cmd, err, gains_);
    }
    state_ = linearized_step(state_, u_actual, params_, cfg_.h);
    return {u_actual, discretize(state_)};
}

std::mt19937_64 episode_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

EpisodeStats run_episode(Environment& env, QTable& table, const LearningConfig& cfg, double epsilon, bool learn,
                         std::mt19937_64& rng, std::vector<TrajectoryRow>* trace) {
    EpisodeStats stats;
    Observation obs = discretize(env.state());
    if (trace) trace->push_back({0.0, 0.0, 0.0, env.state()});
    if (obs.is_failure()) {
        stats.terminal_reason = TerminalReason::Failure;
        return stats;
    }
    for (int step = 0; step < cfg.max_steps; ++step) {
        const DiscreteState s = obs.state();
        const ActionId a = select_action(table, s, epsilon, rng);
        Environment::Step out{0.0, Failure{}};
        try {
            out = env.step(a, rng);
        } catch (const SingularityError&) {
            stats.terminal_reason = TerminalReason::Singularity;
            return stats;
        }
        const double r = reward(out.next);
        stats.cumulative_reward += r;
        if (learn) q_update(table, s, a, r, out.next, cfg.alpha, cfg.gamma);
        if (trace) trace->push_back({(step + 1) * cfg.h, a.accel(), out.u_actual, env.state()});
        if (out.next.is_failure()) {
            stats.terminal_reason = TerminalReason::Failure;
            return stats;
        }
        ++stats.steps_survived;
        obs = out.next;
    }
    stats.terminal_reason = TerminalReason::Timeout;
    return stats;
}

TrainingResult train(const PlantConfig& plant, const LearningConfig& cfg) {
    plant.validate();
    cfg.validate();
    TrainingResult result;
    result.curve.reserve(static_cast<std::size_t>(cfg.episodes));
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        std::mt19937_64 rng = episode_rng(cfg.seed, kTrainStream, static_cast<std::uint64_t>(ep));
        Environment env(plant, cfg, rng);
        result.curve.push_back(run_episode(env, result.table, cfg, cfg.epsilon_at(ep), true, rng));
    }
    return result;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

EvaluationSummary evaluate(const QTable& table, int n_trials, const PlantConfig& plant, const LearningConfig& cfg) {
    plant.validate();
    cfg.validate();
    EvaluationSummary summary;
    summary.trials = std::max(n_trials, 0);
    if (n_trials <= 0) return summary;

    QTable frozen = table;
    std::vector<double> survival;
    survival.reserve(static_cast<std::size_t>(n_trials));
    for (int i = 0; i < n_trials; ++i) {
        std::mt19937_64 rng = episode_rng(cfg.seed, kEvalStream, static_cast<std::uint64_t>(i));
        Environment env(plant, cfg, rng);
        const EpisodeStats stats = run_episode(env, frozen, cfg, 0.0, false, rng);
        summary.episodes.push_back(stats);
        survival.push_back(stats.steps_survived * cfg.h);
        switch (stats.terminal_reason) {
            case TerminalReason::Failure: ++summary.failures; break;
            case TerminalReason::Timeout: ++summary.timeouts; break;
            case TerminalReason::Singularity: ++summary.singularities; break;
        }
    }
    summary.has_data = true;
    summary.mean_survival_s = std::accumulate(survival.begin(), survival.end(), 0.0) / survival.size();
    summary.median_survival_s = median(std::move(survival));
    return summary;
}

std::vector<TrajectoryRow> rollout(const QTable& table, const PlantConfig& plant, const LearningConfig& cfg) {
    plant.validate();
    cfg.validate();
    std::vector<TrajectoryRow> trace;
    QTable frozen = table;
    std::mt19937_64 rng = episode_rng(cfg.seed, kRolloutStream, 0);
    Environment env(plant, cfg, rng);
    run_episode(env, frozen, cfg, 0.0, false, rng, &trace);
    return trace;
}

}  // namespace pendq::rl
