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

#ifndef PENDQ_IO_HPP
#define PENDQ_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pendq/rl.hpp"
#include "pendq/sysid.hpp"

namespace pendq::io {

/// "%.9g": the precision used for every CSV column.
std::string format_number(double value);

// Oscillation traces: header `t,theta_rad`.
void write_trace_csv(std::ostream& out, const std::vector<OscillationSample<double>>& samples);
std::vector<OscillationSample<double>> read_trace_csv(std::istream& in);

// Q tables: header `phi_bin,phidot_bin,x_bin,xdot_bin,action,value`, 2160 rows.
void write_qtable_csv(std::ostream& out, const rl::QTable& table);
/// Throws ShapeError unless every state-action pair appears exactly once.
rl::QTable read_qtable_csv(std::istream& in);

// Training curve: header `episode,steps,reward,terminal`.
void write_curve_csv(std::ostream& out, const std::vector<rl::EpisodeStats>& curve);

// Greedy rollout: header `t,u_cmd,u_actual,x,x_dot,phi,phi_dot`.
void write_trajectory_csv(std::ostream& out, const std::vector<rl::TrajectoryRow>& rows);

// Evaluation trials: header `trial,steps,survival_s,terminal`.
void write_evaluation_csv(std::ostream& out, const rl::EvaluationSummary& summary, double h);

/// key=value lines: I, b, theta0, theta_dot0, rss, iterations, converged.
void write_fit_result(std::ostream& out, const sysid::FitResult& result);

// File helpers; throw IoError when the path cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace pendq::io

#endif  // PENDQ_IO_HPP
