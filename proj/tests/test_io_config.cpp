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

#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "pendq/config.hpp"
#include "pendq/io.hpp"

using namespace pendq;

namespace {

rl::QTable random_table(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 5.0);
    rl::QTable t;
    for (int i = 0; i < rl::kStateCount; ++i)
        for (int a = 0; a < rl::kActionCount; ++a) t.values()(i, a) = d(rng);
    return t;
}

std::string qtable_text(const rl::QTable& t) {
    std::ostringstream out;
    io::write_qtable_csv(out, t);
    return out.str();
}

template <class E, class F>
std::string message_of(F&& f) {
    try {
        f();
    } catch (const E& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(-2.0) == "-2");
    CHECK(io::format_number(1.0 / 3.0) == "0.333333333");
    CHECK(io::format_number(3.4945853519521234e-4) == "0.000349458535");
}

TEST_CASE("Q table CSV round trip") {
    const rl::QTable t = random_table(3);
    const std::string text = qtable_text(t);
    std::istringstream in(text);
    const rl::QTable back = io::read_qtable_csv(in);
    for (int i = 0; i < rl::kStateCount; ++i)
        for (int a = 0; a < rl::kActionCount; ++a)
            CHECK(back.values()(i, a) == doctest::Approx(t.values()(i, a)).epsilon(1e-8));
    CHECK(qtable_text(back) == text);

    // The header plus one row per state-action pair.
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + rl::kStateCount * rl::kActionCount);
    CHECK(text.rfind("phi_bin,phidot_bin,x_bin,xdot_bin,action,value\n", 0) == 0);
}

TEST_CASE("Q table shape errors") {
    const std::string good = qtable_text(rl::QTable{});
    const std::string header = good.substr(0, good.find('\n') + 1);
    const std::string body = good.substr(header.size());

    SUBCASE("truncated") {
        std::istringstream in(header + body.substr(0, body.find('\n', body.size() / 2) + 1));
        CHECK_THROWS_AS(io::read_qtable_csv(in), ShapeError);
    }
    SUBCASE("missing row") {
        std::istringstream in(header + body.substr(body.find('\n') + 1));
        CHECK_THROWS_AS(io::read_qtable_csv(in), ShapeError);
    }
    SUBCASE("duplicate row") {
        std::istringstream in(header + body.substr(0, body.find('\n') + 1) + body);
        CHECK_THROWS_AS(io::read_qtable_csv(in), ShapeError);
    }
    SUBCASE("index out of range") {
        std::istringstream in(header + "6,0,0,0,0,0\n" + body);
        CHECK_THROWS_AS(io::read_qtable_csv(in), ShapeError);
    }
    SUBCASE("wrong field count") {
        std::istringstream in(header + "0,0,0,0,0\n");
        CHECK_THROWS_AS(io::read_qtable_csv(in), ShapeError);
    }
    SUBCASE("non-finite value") {
        std::string text = body;
        text.replace(text.find("0,0,0,0,0,0"), 11, "0,0,0,0,0,nan");
        std::istringstream in(header + text);
        CHECK_THROWS_AS(io::read_qtable_csv(in), ShapeError);
    }
    SUBCASE("wrong header") {
        std::istringstream in("s,a,value\n" + body);
        CHECK_THROWS_AS(io::read_qtable_csv(in), ParseError);
    }
}

TEST_CASE("trace CSV") {
    SUBCASE("round trip") {
        const std::vector<OscillationSample<double>> samples = {{0.0, 0.1}, {0.001, 0.0999}, {0.002, -1.5e-7}};
        std::ostringstream out;
        io::write_trace_csv(out, samples);
        CHECK(out.str() == "t,theta_rad\n0,0.1\n0.001,0.0999\n0.002,-1.5e-07\n");
        std::istringstream in(out.str());
        const auto back = io::read_trace_csv(in);
        REQUIRE(back.size() == 3);
        CHECK(back[2].theta == -1.5e-7);
    }
    SUBCASE("tolerates CRLF and blank trailing lines") {
        std::istringstream in("t,theta_rad\r\n0,1\r\n0.5,2\r\n\n");
        CHECK(io::read_trace_csv(in).size() == 2);
    }
    SUBCASE("malformed number reports its line") {
        std::istringstream in("t,theta_rad\n0,0.1\n0.001,abc\n");
        try {
            io::read_trace_csv(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("non-increasing time") {
        std::istringstream in("t,theta_rad\n0,0.1\n0,0.2\n");
        CHECK_THROWS_AS(io::read_trace_csv(in), ParseError);
    }
    SUBCASE("missing header") {
        std::istringstream in("");
        CHECK_THROWS_AS(io::read_trace_csv(in), ParseError);
    }
}

TEST_CASE("other writers") {
    SUBCASE("curve") {
        std::ostringstream out;
        io::write_curve_csv(out, {{12, rl::TerminalReason::Failure, 11.0}, {1000, rl::TerminalReason::Timeout, 1000.0}});
        CHECK(out.str() == "episode,steps,reward,terminal\n0,12,11,failure\n1,1000,1000,timeout\n");
    }
    SUBCASE("evaluation") {
        rl::EvaluationSummary s;
        s.episodes = {{150, rl::TerminalReason::Failure, 149.0}};
        std::ostringstream out;
        io::write_evaluation_csv(out, s, 0.01);
        CHECK(out.str() == "trial,steps,survival_s,terminal\n0,150,1.5,failure\n");
    }
    SUBCASE("trajectory") {
        std::ostringstream out;
        io::write_trajectory_csv(out, {{0.01, 0.5, 0.5001, make_state(0.0, 0.005, 0.01, -0.02)}});
        CHECK(out.str() == "t,u_cmd,u_actual,x,x_dot,phi,phi_dot\n0.01,0.5,0.5001,0,0.005,0.01,-0.02\n");
    }
}

TEST_CASE("file helpers") {
    CHECK_THROWS_AS(io::read_file("/nonexistent/dir/file.csv"), IoError);
    CHECK_THROWS_AS(io::write_file("/nonexistent/dir/file.csv", "x"), IoError);
}

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config(
        "# comment line\n"
        "\n"
        "m = 0.06   # trailing comment\n"
        "links=0.3,0.3,0.2\n"
        "kp=50\n"
        "tracking_mode=clik\n"
        "episodes=200\n"
        "seed=7\n");
    CHECK(cfg.params.m == 0.06);
    CHECK(cfg.links == std::vector<double>{0.3, 0.3, 0.2});
    CHECK(cfg.learning.tracking_mode == rl::TrackingMode::Clik);
    CHECK(cfg.learning.episodes == 200);
    CHECK(cfg.learning.seed == 7);
    CHECK(cfg.oscillation.seed == 7);

    const rl::PlantConfig plant = cfg.plant();
    CHECK(plant.arm.dof() == 3);
    CHECK(plant.gains.kp.size() == 3);
    CHECK(plant.gains.kp(2) == 50.0);
    CHECK(plant.home.size() == 3);
}

TEST_CASE("config errors carry line numbers") {
    const std::string unknown = message_of<ParseError>([] { parse_config("I=0.001\nfoo=1\n"); });
    CHECK(unknown.find("line 2") != std::string::npos);
    CHECK(unknown.find("foo") != std::string::npos);

    CHECK_THROWS_AS(parse_config("alpha=fast\n"), ParseError);
    CHECK_THROWS_AS(parse_config("episodes=1.5\n"), ParseError);
    CHECK_THROWS_AS(parse_config("just text\n"), ParseError);
    CHECK_THROWS_AS(parse_config("tracking_mode=magic\n"), ValidationError);
}

TEST_CASE("config validation") {
    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());

    apply_overrides(cfg, {"alpha=0"});
    CHECK_THROWS_AS(cfg.validate(), ValidationError);

    cfg = RunConfig{};
    apply_overrides(cfg, {"duration=0"});
    CHECK_THROWS_AS(cfg.validate(), ValidationError);

    cfg = RunConfig{};
    apply_overrides(cfg, {"I=-1"});
    CHECK_THROWS_AS(cfg.validate(), Error);

    cfg = RunConfig{};
    apply_overrides(cfg, {"links=0.4"});
    CHECK_THROWS_AS(cfg.plant(), ValidationError);

    cfg = RunConfig{};
    apply_overrides(cfg, {"kp=1,2,3"});
    CHECK_THROWS_AS(cfg.plant(), ValidationError);

    CHECK_THROWS_AS(apply_overrides(cfg, {"gamma"}), ParseError);
}

TEST_CASE("overrides apply in order") {
    RunConfig cfg = parse_config("gamma=0.9\n");
    apply_overrides(cfg, {"gamma=0.8", "gamma=0.7", "h=0.005"});
    CHECK(cfg.learning.gamma == 0.7);
    CHECK(cfg.learning.h == 0.005);
}
