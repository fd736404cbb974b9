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

#ifndef PENDQ_RL_HPP
#define PENDQ_RL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pendq/clik.hpp"
#include "pendq/dynamics.hpp"

namespace pendq::rl {

inline constexpr int kPhiBins = 6;
inline constexpr int kPhiDotBins = 5;
inline constexpr int kXBins = 3;
inline constexpr int kXDotBins = 3;
inline constexpr int kStateCount = kPhiBins * kPhiDotBins * kXBins * kXDotBins;  // 270
inline constexpr int kActionCount = 8;

/// Flange accelerations [m/s^2] selectable by the agent. Zero is not among them.
inline constexpr std::array<double, kActionCount> kActionAccel = {-2.0, -1.5, -1.0, -0.5,
                                                                  0.5,  1.0,  1.5,  2.0};

struct DiscreteState {
    int phi_bin = 0;
    int phidot_bin = 0;
    int x_bin = 0;
    int xdot_bin = 0;

    /// Row index into a QTable; phi varies slowest, x_dot fastest.
    int index() const { return ((phi_bin * kPhiDotBins + phidot_bin) * kXBins + x_bin) * kXDotBins + xdot_bin; }
    static DiscreteState from_index(int index);
    bool valid() const;

    friend bool operator==(const DiscreteState&, const DiscreteState&) = default;
};

/// Terminal outcome of a transition: the pendulum or the flange left its limits.
struct Failure {
    friend bool operator==(const Failure&, const Failure&) = default;
};

/// Either a bin tuple or the failure region.
class Observation {
public:
    Observation(DiscreteState s) : state_(s) {}
    Observation(Failure) {}

    bool is_failure() const { return !state_.has_value(); }
    const DiscreteState& state() const { return state_.value(); }

private:
    std::optional<DiscreteState> state_;
};

class ActionId {
public:
    explicit ActionId(int index);
    int index() const { return index_; }
    double accel() const { return kActionAccel[static_cast<std::size_t>(index_)]; }
    friend bool operator==(const ActionId&, const ActionId&) = default;

private:
    int index_;
};

/// Bin the continuous state using the interval conventions of the balancing
/// task; returns Failure whenever is_failure(s) holds.
Observation discretize(const ContinuousState<double>& s);

/// Scalar state-action values over all 270 x 8 pairs, initially zero.
class QTable {
public:
    using Values = Eigen::Matrix<double, kStateCount, kActionCount, Eigen::RowMajor>;

    QTable() : values_(Values::Zero()) {}

    double operator()(const DiscreteState& s, ActionId a) const { return values_(s.index(), a.index()); }
    double& operator()(const DiscreteState& s, ActionId a) { return values_(s.index(), a.index()); }

    double max_value(const DiscreteState& s) const { return values_.row(s.index()).maxCoeff(); }
    /// Lowest-index maximizer.
    ActionId greedy_action(const DiscreteState& s) const;

    const Values& values() const { return values_; }
    Values& values() { return values_; }

    friend bool operator==(const QTable& a, const QTable& b) { return a.values_ == b.values_; }

private:
    Values values_;
};

/// (1 - alpha) q + alpha (r + gamma next_max): the tabular Q-learning blend.
inline double q_learning_target_blend(double q, double r, double next_max, double alpha, double gamma) {
    return (1.0 - alpha) * q + alpha * (r + gamma * next_max);
}

/// In-place Q-learning update. A failure successor is terminal and
/// contributes no bootstrap value.
void q_update(QTable& table, const DiscreteState& s, ActionId a, double r, const Observation& s_next,
              double alpha, double gamma);

/// Epsilon-greedy choice; greedy ties go to the lowest action index.
ActionId select_action(const QTable& table, const DiscreteState& s, double epsilon, std::mt19937_64& rng);

/// +1 for surviving a step, -1 for entering the failure region.
inline double reward(const Observation& s_next) { return s_next.is_failure() ? -1.0 : 1.0; }

enum class TrackingMode { Ideal, Clik };

std::string to_string(TrackingMode mode);
TrackingMode parse_tracking_mode(const std::string& text);

struct LearningConfig {
    double alpha = 0.1;
    double gamma = 0.95;
    int episodes = 10000;
    double h = 0.01;
    int max_steps = 1000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    int epsilon_decay_episodes = 8000;
    /// Log-normal sigma applied independently to I and b at each episode start.
    double param_noise_rel = 0.02;
    /// Per-step sigma added to every component of e and e_dot.
    double error_noise = 1e-3;
    TrackingMode tracking_mode = TrackingMode::Ideal;
    std::uint64_t seed = 1;
    /// Initial pendulum angle is drawn uniformly from +-phi0_max_deg.
    double phi0_max_deg = 2.0;

    void validate() const;
    /// Linear anneal from epsilon_start to epsilon_end, flat afterwards.
    double epsilon_at(int episode) const;
};

/// Everything about the plant that is fixed across episodes.
struct PlantConfig {
    PendulumParams<double> params = PendulumParams<double>::defaults();
    ManipulatorModel<double> arm = ManipulatorModel<double>::planar({0.4, 0.4});
    Gains<double> gains = Gains<double>::uniform(100.0, 20.0, 2);
    JointVector<double> home = default_home_posture<double>(2);

    void validate() const;
};

enum class TerminalReason { Failure, Timeout, Singularity };

std::string to_string(TerminalReason reason);

struct EpisodeStats {
    int steps_survived = 0;
    TerminalReason terminal_reason = TerminalReason::Timeout;
    double cumulative_reward = 0.0;
};

/// One row of a logged episode; angles in radians.
struct TrajectoryRow {
    double t;
    double u_cmd;
    double u_actual;
    ContinuousState<double> state;
};

/**
 * One randomized episode of the balancing task: the pendulum parameters are
 * perturbed at construction, the pendulum starts near upright with the
 * flange at rest, and step() advances the linearized model by h under the
 * tracked acceleration.
 */
class Environment {
public:
    Environment(const PlantConfig& plant, const LearningConfig& cfg, std::mt19937_64& rng);

    const ContinuousState<double>& state() const { return state_; }
    const PendulumParams<double>& episode_params() const { return params_; }

    struct Step {
        double u_actual;
        Observation next;
    };

    /// May throw SingularityError in CLIK tracking mode.
    Step step(ActionId a, std::mt19937_64& rng);

private:
    LearningConfig cfg_;
    PendulumParams<double> params_;
    Gains<double> gains_;
    std::optional<TrackingChannel<double>> channel_;
    ContinuousState<double> state_;
};

/// Per-episode generator derived from (seed, stream, index) so that results
/// do not depend on execution order.
std::mt19937_64 episode_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

inline constexpr std::uint64_t kTrainStream = 0;
inline constexpr std::uint64_t kEvalStream = 1;
inline constexpr std::uint64_t kRolloutStream = 2;

/// Run one episode. When learn is false the table is left untouched.
/// If trace is non-null every step is appended to it, with the initial
/// state logged first.
EpisodeStats run_episode(Environment& env, QTable& table, const LearningConfig& cfg, double epsilon, bool learn,
                         std::mt19937_64& rng, std::vector<TrajectoryRow>* trace = nullptr);

struct TrainingResult {
    QTable table;
    std::vector<EpisodeStats> curve;
};

TrainingResult train(const PlantConfig& plant, const LearningConfig& cfg);

struct EvaluationSummary {
    int trials = 0;
    bool has_data = false;
    double median_survival_s = 0.0;
    double mean_survival_s = 0.0;
    int failures = 0;
    int timeouts = 0;
    int singularities = 0;
    std::vector<EpisodeStats> episodes;
};

/// Greedy, non-learning episodes under the training noise model.
EvaluationSummary evaluate(const QTable& table, int n_trials, const PlantConfig& plant, const LearningConfig& cfg);

/// One greedy episode with a full per-step log.
std::vector<TrajectoryRow> rollout(const QTable& table, const PlantConfig& plant, const LearningConfig& cfg);

double median(std::vector<double> values);

}  // namespace pendq::rl

#endif  // PENDQ_RL_HPP
