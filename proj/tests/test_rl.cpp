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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "pendq/rl.hpp"

using namespace pendq;
using namespace pendq::rl;

namespace {

ContinuousState<double> state_deg(double x, double x_dot, double phi_deg, double phi_dot_deg) {
    return make_state(x, x_dot, deg_to_rad(phi_deg), deg_to_rad(phi_dot_deg));
}

DiscreteState bins(const ContinuousState<double>& s) {
    const Observation o = discretize(s);
    REQUIRE_FALSE(o.is_failure());
    return o.state();
}

// Interval membership written out from the bracket notation, used as an
// oracle independent of the if-chains in discretize().
struct Interval {
    double lo, hi;
    bool lo_closed, hi_closed;
    bool contains(double v) const {
        return (lo_closed ? v >= lo : v > lo) && (hi_closed ? v <= hi : v < hi);
    }
};

constexpr double inf = std::numeric_limits<double>::infinity();

const std::array<Interval, 6> kPhiIntervals = {{{deg_to_rad(-11.0), deg_to_rad(-5.0), false, false},
                                                {deg_to_rad(-5.0), deg_to_rad(-1.0), true, false},
                                                {deg_to_rad(-1.0), 0.0, true, false},
                                                {0.0, deg_to_rad(1.0), true, false},
                                                {deg_to_rad(1.0), deg_to_rad(5.0), true, false},
                                                {deg_to_rad(5.0), deg_to_rad(11.0), true, false}}};
const std::array<Interval, 5> kPhiDotIntervals = {{{-inf, deg_to_rad(-50.0), false, true},
                                                   {deg_to_rad(-50.0), deg_to_rad(-10.0), false, true},
                                                   {deg_to_rad(-10.0), deg_to_rad(10.0), false, false},
                                                   {deg_to_rad(10.0), deg_to_rad(50.0), true, false},
                                                   {deg_to_rad(50.0), inf, true, false}}};
const std::array<Interval, 3> kXIntervals = {{{-0.22, -0.08, false, true}, {-0.08, 0.08, false, false}, {0.08, 0.22, true, false}}};
const std::array<Interval, 3> kXDotIntervals = {{{-inf, -0.5, false, true}, {-0.5, 0.5, false, false}, {0.5, inf, true, false}}};

template <std::size_t N>
std::vector<int> matches(const std::array<Interval, N>& intervals, double v) {
    std::vector<int> out;
    for (std::size_t i = 0; i < N; ++i)
        if (intervals[i].contains(v)) out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace

TEST_CASE("discretize examples") {
    CHECK(bins(state_deg(0.0, 0.0, 0.5, 0.0)) == DiscreteState{3, 2, 1, 1});
    CHECK(bins(state_deg(-0.1, 0.0, -6.0, -20.0)) == DiscreteState{0, 1, 0, 1});
    CHECK(discretize(state_deg(0.0, 0.0, 12.0, 0.0)).is_failure());
    CHECK(discretize(state_deg(0.25, 0.0, 0.0, 0.0)).is_failure());
}

TEST_CASE("discretize puts boundary values in the bracketed interval") {
    CHECK(discretize(state_deg(0.0, 0.0, -11.0, 0.0)).is_failure());
    CHECK(bins(state_deg(0.0, 0.0, -5.0, 0.0)).phi_bin == 1);
    CHECK(bins(state_deg(0.0, 0.0, -1.0, 0.0)).phi_bin == 2);
    CHECK(bins(state_deg(0.0, 0.0, 0.0, 0.0)).phi_bin == 3);
    CHECK(bins(state_deg(0.0, 0.0, 1.0, 0.0)).phi_bin == 4);
    CHECK(bins(state_deg(0.0, 0.0, 5.0, 0.0)).phi_bin == 5);
    CHECK(discretize(state_deg(0.0, 0.0, 11.0, 0.0)).is_failure());

    CHECK(bins(state_deg(0.0, 0.0, 0.0, -50.0)).phidot_bin == 0);
    CHECK(bins(state_deg(0.0, 0.0, 0.0, -10.0)).phidot_bin == 1);
    CHECK(bins(state_deg(0.0, 0.0, 0.0, 10.0)).phidot_bin == 3);
    CHECK(bins(state_deg(0.0, 0.0, 0.0, 50.0)).phidot_bin == 4);

    CHECK(discretize(state_deg(-0.22, 0.0, 0.0, 0.0)).is_failure());
    CHECK(bins(state_deg(-0.08, 0.0, 0.0, 0.0)).x_bin == 0);
    CHECK(bins(state_deg(0.08, 0.0, 0.0, 0.0)).x_bin == 2);
    CHECK(discretize(state_deg(0.22, 0.0, 0.0, 0.0)).is_failure());

    CHECK(bins(state_deg(0.0, -0.5, 0.0, 0.0)).xdot_bin == 0);
    CHECK(bins(state_deg(0.0, 0.5, 0.0, 0.0)).xdot_bin == 2);
}

TEST_CASE("discretize partitions the admissible region") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> x(-0.25, 0.25), xd(-2.0, 2.0), phi(deg_to_rad(-12.0), deg_to_rad(12.0)),
        phid(deg_to_rad(-200.0), deg_to_rad(200.0));
    for (int i = 0; i < 100000; ++i) {
        const auto s = make_state(x(rng), xd(rng), phi(rng), phid(rng));
        const auto m_phi = matches(kPhiIntervals, s(kPhi));
        const auto m_phid = matches(kPhiDotIntervals, s(kPhiDot));
        const auto m_x = matches(kXIntervals, s(kX));
        const auto m_xd = matches(kXDotIntervals, s(kXDot));
        REQUIRE(m_phid.size() == 1);
        REQUIRE(m_xd.size() == 1);
        const Observation o = discretize(s);
        if (o.is_failure()) {
            CHECK(is_failure(s));
            CHECK((m_phi.empty() || m_x.empty()));
            continue;
        }
        REQUIRE(m_phi.size() == 1);
        REQUIRE(m_x.size() == 1);
        CHECK(o.state() == DiscreteState{m_phi[0], m_phid[0], m_x[0], m_xd[0]});
    }
}

TEST_CASE("state index round trip") {
    for (int i = 0; i < kStateCount; ++i) {
        const DiscreteState s = DiscreteState::from_index(i);
        CHECK(s.valid());
        CHECK(s.index() == i);
    }
    CHECK_THROWS_AS(DiscreteState::from_index(kStateCount), ContractError);
    CHECK_THROWS_AS(ActionId(8), ContractError);
    CHECK(ActionId(0).accel() == -2.0);
    CHECK(ActionId(4).accel() == 0.5);
}

TEST_CASE("q_update") {
    const DiscreteState s{3, 2, 1, 1};
    const DiscreteState next{4, 2, 1, 1};
    const ActionId a(5);

    SUBCASE("full overwrite without bootstrap") {
        QTable t;
        q_update(t, s, a, 1.0, next, 1.0, 0.0);
        CHECK(t(s, a) == 1.0);
    }
    SUBCASE("blend with bootstrap") {
        QTable t;
        t(next, ActionId(2)) = 2.0;
        t(next, ActionId(6)) = -1.0;
        q_update(t, s, a, 1.0, next, 0.5, 0.9);
        CHECK(t(s, a) == doctest::Approx(1.4).epsilon(1e-15));
    }
    SUBCASE("terminal successor has no future value") {
        QTable t;
        t(next, ActionId(2)) = 2.0;
        q_update(t, s, a, -1.0, Failure{}, 0.5, 0.9);
        CHECK(t(s, a) == -0.5);
    }
    SUBCASE("zero learning rate is a no-op") {
        QTable t;
        t(s, a) = 0.25;
        t(next, ActionId(0)) = 3.0;
        const QTable before = t;
        q_update(t, s, a, 7.0, next, 0.0, 0.9);
        CHECK(t == before);
    }
}

TEST_CASE("select_action") {
    const DiscreteState s{2, 2, 1, 1};
    std::mt19937_64 rng(99);

    SUBCASE("greedy") {
        QTable t;
        t(s, ActionId(2)) = 5.0;
        CHECK(select_action(t, s, 0.0, rng).index() == 2);
    }
    SUBCASE("ties go to the lowest index") {
        QTable t;
        t.values().row(s.index()).setConstant(3.0);
        CHECK(select_action(t, s, 0.0, rng).index() == 0);
        t(s, ActionId(3)) = 4.0;
        t(s, ActionId(6)) = 4.0;
        CHECK(select_action(t, s, 0.0, rng).index() == 3);
    }
    SUBCASE("epsilon one is uniform") {
        QTable t;
        t(s, ActionId(2)) = 5.0;
        const int draws = 100000;
        std::array<int, kActionCount> counts{};
        for (int i = 0; i < draws; ++i) ++counts[static_cast<std::size_t>(select_action(t, s, 1.0, rng).index())];
        const double expected = draws / 8.0;
        const double sigma = std::sqrt(draws * (1.0 / 8.0) * (7.0 / 8.0));
        for (int c : counts) CHECK(std::abs(c - expected) < 3.0 * sigma);
    }
    SUBCASE("greedy choice is invariant to a constant shift") {
        std::normal_distribution<double> d(0.0, 1.0);
        QTable t;
        for (int i = 0; i < kStateCount; ++i)
            for (int a = 0; a < kActionCount; ++a) t.values()(i, a) = std::round(4.0 * d(rng)) / 4.0;
        QTable shifted = t;
        shifted.values().array() += 17.25;
        for (int i = 0; i < kStateCount; ++i) {
            const DiscreteState si = DiscreteState::from_index(i);
            CHECK(select_action(t, si, 0.0, rng) == select_action(shifted, si, 0.0, rng));
        }
    }
}

TEST_CASE("reward") {
    CHECK(reward(DiscreteState{3, 2, 1, 1}) == 1.0);
    CHECK(reward(Failure{}) == -1.0);
}

TEST_CASE("epsilon schedule") {
    LearningConfig cfg;
    CHECK(cfg.epsilon_at(0) == 1.0);
    CHECK(cfg.epsilon_at(4000) == doctest::Approx(0.525));
    CHECK(cfg.epsilon_at(8000) == 0.05);
    CHECK(cfg.epsilon_at(9999) == 0.05);
}

TEST_CASE("configuration validation") {
    LearningConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = LearningConfig{};
    cfg.gamma = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = LearningConfig{};
    cfg.episodes = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK_THROWS_AS(parse_tracking_mode("perfect"), ValidationError);
}

TEST_CASE("run_episode") {
    const PlantConfig plant;
    LearningConfig cfg;

    SUBCASE("an all-zero table always pushes with -2 m/s^2 and falls quickly") {
        std::mt19937_64 rng = episode_rng(1, kTrainStream, 0);
        Environment env(plant, cfg, rng);
        QTable table;
        std::vector<TrajectoryRow> trace;
        const EpisodeStats stats = run_episode(env, table, cfg, 0.0, false, rng, &trace);
        CHECK(stats.terminal_reason == TerminalReason::Failure);
        CHECK(stats.steps_survived <= 48);
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i].u_cmd == -2.0);
        CHECK(table == QTable{});
    }
    SUBCASE("zero step budget") {
        cfg.max_steps = 0;
        std::mt19937_64 rng = episode_rng(1, kTrainStream, 0);
        Environment env(plant, cfg, rng);
        QTable table;
        const EpisodeStats stats = run_episode(env, table, cfg, 0.0, true, rng);
        CHECK(stats.steps_survived == 0);
        CHECK(stats.terminal_reason == TerminalReason::Timeout);
    }
    SUBCASE("learning changes only visited entries") {
        std::mt19937_64 rng = episode_rng(1, kTrainStream, 0);
        Environment env(plant, cfg, rng);
        QTable table;
        const EpisodeStats stats = run_episode(env, table, cfg, 1.0, true, rng);
        const int touched = static_cast<int>((table.values().array() != 0.0).count());
        CHECK(touched >= 1);
        CHECK(touched <= stats.steps_survived + 1);
        CHECK(stats.cumulative_reward == doctest::Approx(stats.steps_survived - (stats.terminal_reason == TerminalReason::Failure ? 1 : 0)));
    }
    SUBCASE("clik tracking runs and a singular arm aborts the episode") {
        cfg.tracking_mode = TrackingMode::Clik;
        std::mt19937_64 rng = episode_rng(3, kTrainStream, 0);
        Environment env(plant, cfg, rng);
        QTable table;
        const EpisodeStats ok = run_episode(env, table, cfg, 1.0, true, rng);
        CHECK(ok.terminal_reason != TerminalReason::Singularity);

        PlantConfig straight = plant;
        straight.home = JointVector<double>::Zero(2);
        Environment bad(straight, cfg, rng);
        const EpisodeStats aborted = run_episode(bad, table, cfg, 0.0, true, rng);
        CHECK(aborted.terminal_reason == TerminalReason::Singularity);
        CHECK(aborted.steps_survived == 0);
    }
}

TEST_CASE("episode parameter noise is log-normal around the nominal values") {
    const PlantConfig plant;
    LearningConfig cfg;
    const int n = 4000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        std::mt19937_64 rng = episode_rng(5, kTrainStream, static_cast<std::uint64_t>(i));
        Environment env(plant, cfg, rng);
        const double li = std::log(env.episode_params().I / plant.params.I);
        sum += li;
        sum_sq += li * li;
        CHECK(std::abs(rad_to_deg(env.state()(kPhi))) <= 2.0);
        CHECK(env.state()(kX) == 0.0);
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean) < 3.0 * 0.02 / std::sqrt(static_cast<double>(n)));
    CHECK(sd == doctest::Approx(0.02).epsilon(0.05));
}

TEST_CASE("train is deterministic") {
    const PlantConfig plant;
    LearningConfig cfg;
    cfg.episodes = 300;
    cfg.epsilon_decay_episodes = 200;
    const TrainingResult a = train(plant, cfg);
    const TrainingResult b = train(plant, cfg);
    CHECK(a.table == b.table);
    REQUIRE(a.curve.size() == 300);
    for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].steps_survived == b.curve[i].steps_survived);

    cfg.episodes = 1;
    CHECK(train(plant, cfg).curve.size() == 1);

    cfg.episodes = 300;
    cfg.seed = 2;
    CHECK_FALSE(train(plant, cfg).table == a.table);
}

TEST_CASE("evaluate") {
    const PlantConfig plant;
    const LearningConfig cfg;
    const EvaluationSummary zero = evaluate(QTable{}, 100, plant, cfg);
    CHECK(zero.has_data);
    CHECK(zero.median_survival_s < 1.0);
    CHECK(zero.failures == 100);

    const EvaluationSummary none = evaluate(QTable{}, 0, plant, cfg);
    CHECK_FALSE(none.has_data);
    CHECK(none.episodes.empty());
}

TEST_CASE("default training improves survival") {
    const PlantConfig plant;
    const LearningConfig cfg;
    const TrainingResult result = train(plant, cfg);
    std::vector<double> first, last;
    for (int i = 0; i < 1000; ++i) first.push_back(result.curve[static_cast<std::size_t>(i)].steps_survived);
    for (int i = 9000; i < 10000; ++i) last.push_back(result.curve[static_cast<std::size_t>(i)].steps_survived);
    CHECK(median(last) > median(first));
    const EvaluationSummary greedy = evaluate(result.table, 100, plant, cfg);
    CHECK(greedy.mean_survival_s > evaluate(QTable{}, 100, plant, cfg).mean_survival_s);
}

TEST_CASE("median") {
    CHECK(median({}) == 0.0);
    CHECK(median({3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
}
