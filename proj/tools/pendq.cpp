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

// Command-line front end: oscillate, fit, train, eval, rollout.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pendq/config.hpp"
#include "pendq/io.hpp"
#include "pendq/rl.hpp"
#include "pendq/sysid.hpp"

namespace {

using namespace pendq;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--config", common.config_path, "key=value configuration file");
    cmd->add_option("--seed", common.seed, "RNG seed (overrides the config file)");
    cmd->add_option("--set", common.overrides, "override a config entry, key=value (repeatable)");
}

RunConfig load_config(const CommonOptions& common) {
    RunConfig cfg = common.config_path.empty() ? RunConfig{} : parse_config(io::read_file(common.config_path));
    apply_overrides(cfg, common.overrides);
    if (common.seed) cfg.set("seed", std::to_string(*common.seed));
    cfg.validate();
    return cfg;
}

template <typename Writer>
void write_output(const std::string& path, Writer&& writer) {
    std::ostringstream ss;
    writer(ss);
    io::write_file(path, ss.str());
}

int cmd_oscillate(const CommonOptions& common, const std::string& out_path) {
    const RunConfig cfg = load_config(common);
    const auto& osc = cfg.oscillation;
    sysid::EncoderOptions opts;
    opts.duration = osc.duration;
    opts.sample_rate = osc.sample_rate;
    opts.noise_std = osc.noise_std;
    opts.counts_per_rev = osc.counts_per_rev;
    opts.seed = osc.seed;
    const auto trace = sysid::generate_synthetic_encoder_data(cfg.params, osc.theta0, osc.theta_dot0, opts);
    write_output(out_path, [&](std::ostream& os) { io::write_trace_csv(os, trace); });

    std::cout << "natural_period_s=" << io::format_number(natural_period(cfg.params)) << '\n';
    if (const auto measured = sysid::period_from_crossings(trace, 0.0))
        std::cout << "crossing_period_s=" << io::format_number(*measured) << '\n';
    std::cout << "samples=" << trace.size() << '\n';
    return 0;
}

int cmd_fit(const CommonOptions& common, const std::string& data_path, const std::string& out_path) {
    const RunConfig cfg = load_config(common);
    std::istringstream in(io::read_file(data_path));
    const auto data = io::read_trace_csv(in);
    if (data.empty()) throw DegenerateDataError("trace '" + data_path + "' has no samples");

    sysid::FitConfig fit_cfg;
    fit_cfg.initial_guess =
        sysid::guess_from_data(data, cfg.fit.I0.value_or(cfg.params.I), cfg.fit.b0.value_or(cfg.params.b));
    fit_cfg.max_iterations = cfg.fit.max_iterations;
    fit_cfg.tolerance = cfg.fit.tolerance;
    const auto result = sysid::fit_parameters(data, sysid::FixedConstants::from(cfg.params), fit_cfg);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    write_output(out_path, [&](std::ostream& os) { io::write_fit_result(os, result); });
    io::write_fit_result(std::cout, result);
    return result.converged ? 0 : static_cast<int>(ExitCode::NotConverged);
}

int cmd_train(const CommonOptions& common, const std::string& table_path, const std::string& curve_path) {
    const RunConfig cfg = load_config(common);
    const auto start = std::chrono::steady_clock::now();
    const rl::TrainingResult result = rl::train(cfg.plant(), cfg.learning);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_output(table_path, [&](std::ostream& os) { io::write_qtable_csv(os, result.table); });
    if (!curve_path.empty())
        write_output(curve_path, [&](std::ostream& os) { io::write_curve_csv(os, result.curve); });

    const std::size_t tail = std::min<std::size_t>(1000, result.curve.size());
    std::vector<double> last;
    for (std::size_t i = result.curve.size() - tail; i < result.curve.size(); ++i)
        last.push_back(result.curve[i].steps_survived * cfg.learning.h);
    std::cout << "episodes=" << result.curve.size() << '\n'
              << "final_median_survival_s=" << io::format_number(rl::median(last)) << '\n'
              << "training_time_s=" << io::format_number(elapsed) << '\n';
    return 0;
}

int cmd_eval(const CommonOptions& common, const std::string& table_path, const std::string& out_path) {
    const RunConfig cfg = load_config(common);
    std::istringstream in(io::read_file(table_path));
    const rl::QTable table = io::read_qtable_csv(in);
    const rl::EvaluationSummary summary = rl::evaluate(table, cfg.eval_trials, cfg.plant(), cfg.learning);
    if (!out_path.empty())
        write_output(out_path, [&](std::ostream& os) { io::write_evaluation_csv(os, summary, cfg.learning.h); });

    std::cout << "trials=" << summary.trials << '\n';
    if (!summary.has_data) {
        std::cout << "no_data=true\n";
        return 0;
    }
    std::cout << "median_survival_s=" << io::format_number(summary.median_survival_s) << '\n'
              << "mean_survival_s=" << io::format_number(summary.mean_survival_s) << '\n'
              << "failures=" << summary.failures << '\n'
              << "timeouts=" << summary.timeouts << '\n'
              << "singularities=" << summary.singularities << '\n';
    return 0;
}

int cmd_rollout(const CommonOptions& common, const std::string& table_path, const std::string& out_path) {
    const RunConfig cfg = load_config(common);
    std::istringstream in(io::read_file(table_path));
    const rl::QTable table = io::read_qtable_csv(in);
    const auto rows = rl::rollout(table, cfg.plant(), cfg.learning);
    write_output(out_path, [&](std::ostream& os) { io::write_trajectory_csv(os, rows); });
    std::cout << "steps=" << rows.size() - 1 << '\n'
              << "survival_s=" << io::format_number(rows.back().t) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inverted pendulum system identification and tabular Q-learning"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string out, data, table, curve;

    auto* oscillate = app.add_subcommand("oscillate", "simulate a free oscillation trace (t,theta_rad CSV)");
    add_common(oscillate, common);
    oscillate->add_option("--out", out, "output CSV")->required();

    auto* fit = app.add_subcommand("fit", "estimate I and b from an oscillation trace");
    add_common(fit, common);
    fit->add_option("--data", data, "input t,theta_rad CSV")->required();
    fit->add_option("--out", out, "output key=value file")->required();

    auto* train = app.add_subcommand("train", "train a Q table");
    add_common(train, common);
    train->add_option("--out", out, "output Q table CSV")->required();
    train->add_option("--curve", curve, "output training curve CSV");

    auto* eval = app.add_subcommand("eval", "evaluate a Q table greedily");
    add_common(eval, common);
    eval->add_option("--table", table, "Q table CSV")->required();
    eval->add_option("--out", out, "per-trial CSV");

    auto* roll = app.add_subcommand("rollout", "log one greedy episode");
    add_common(roll, common);
    roll->add_option("--table", table, "Q table CSV")->required();
    roll->add_option("--out", out, "trajectory CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::Validation);
    }

    try {
        if (*oscillate) return cmd_oscillate(common, out);
        if (*fit) return cmd_fit(common, data, out);
        if (*train) return cmd_train(common, out, curve);
        if (*eval) return cmd_eval(common, table, out);
        if (*roll) return cmd_rollout(common, table, out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
