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

#include "pendq/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pendq::io {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_double(const std::string& text, std::size_t line) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) throw ParseError("not a number: '" + text + "'", line);
    return value;
}

int parse_int(const std::string& text, std::size_t line) {
    int value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) throw ParseError("not an integer: '" + text + "'", line);
    return value;
}

void expect_header(std::istream& in, const std::string& header) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing header '" + header + "'", 1);
    if (strip_cr(line) != header) throw ParseError("expected header '" + header + "'", 1);
}

}  // namespace

std::string format_number(double value) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.9g", value);
    return buf.data();
}

void write_trace_csv(std::ostream& out, const std::vector<OscillationSample<double>>& samples) {
    out << "t,theta_rad\n";
    for (const auto& s : samples) out << format_number(s.t) << ',' << format_number(s.theta) << '\n';
}

std::vector<OscillationSample<double>> read_trace_csv(std::istream& in) {
    expect_header(in, "t,theta_rad");
    std::vector<OscillationSample<double>> samples;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2) throw ParseError("expected 2 fields", lineno);
        samples.push_back({parse_double(fields[0], lineno), parse_double(fields[1], lineno)});
        if (samples.size() > 1 && !(samples.back().t > samples[samples.size() - 2].t))
            throw ParseError("time stamps must be strictly increasing", lineno);
        if (samples.back().t < 0.0) throw ParseError("negative time stamp", lineno);
    }
    return samples;
}

void write_qtable_csv(std::ostream& out, const rl::QTable& table) {
    out << "phi_bin,phidot_bin,x_bin,xdot_bin,action,value\n";
    for (int index = 0; index < rl::kStateCount; ++index) {
        const rl::DiscreteState s = rl::DiscreteState::from_index(index);
        for (int a = 0; a < rl::kActionCount; ++a) {
            out << s.phi_bin << ',' << s.phidot_bin << ',' << s.x_bin << ',' << s.xdot_bin << ',' << a << ','
                << format_number(table(s, rl::ActionId(a))) << '\n';
        }
    }
}

rl::QTable read_qtable_csv(std::istream& in) {
    expect_header(in, "phi_bin,phidot_bin,x_bin,xdot_bin,action,value");
    rl::QTable table;
    std::vector<bool> seen(rl::kStateCount * rl::kActionCount, false);
    std::size_t rows = 0;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 6) throw ShapeError("line " + std::to_string(lineno) + ": expected 6 fields");
        const rl::DiscreteState s{parse_int(fields[0], lineno), parse_int(fields[1], lineno),
                                  parse_int(fields[2], lineno), parse_int(fields[3], lineno)};
        const int a = parse_int(fields[4], lineno);
        if (!s.valid() || a < 0 || a >= rl::kActionCount)
            throw ShapeError("line " + std::to_string(lineno) + ": bin or action index out of range");
        const std::size_t slot = static_cast<std::size_t>(s.index() * rl::kActionCount + a);
        if (seen[slot]) throw ShapeError("line " + std::to_string(lineno) + ": duplicate state-action pair");
        seen[slot] = true;
        const double value = parse_double(fields[5], lineno);
        if (!std::isfinite(value)) throw ShapeError("line " + std::to_string(lineno) + ": non-finite value");
        table(s, rl::ActionId(a)) = value;
        ++rows;
    }
    if (rows != seen.size())
        throw ShapeError("Q table has " + std::to_string(rows) + " rows, expected " + std::to_string(seen.size()));
    return table;
}

void write_curve_csv(std::ostream& out, const std::vector<rl::EpisodeStats>& curve) {
    out << "episode,steps,reward,terminal\n";
    for (std::size_t i = 0; i < curve.size(); ++i)
        out << i << ',' << curve[i].steps_survived << ',' << format_number(curve[i].cumulative_reward) << ','
            << rl::to_string(curve[i].terminal_reason) << '\n';
}

void write_trajectory_csv(std::ostream& out, const std::vector<rl::TrajectoryRow>& rows) {
    out << "t,u_cmd,u_actual,x,x_dot,phi,phi_dot\n";
    for (const auto& r : rows) {
        out << format_number(r.t) << ',' << format_number(r.u_cmd) << ',' << format_number(r.u_actual);
        for (Eigen::Index i = 0; i < 4; ++i) out << ',' << format_number(r.state(i));
        out << '\n';
    }
}

void write_evaluation_csv(std::ostream& out, const rl::EvaluationSummary& summary, double h) {
    out << "trial,steps,survival_s,terminal\n";
    for (std::size_t i = 0; i < summary.episodes.size(); ++i) {
        const auto& e = summary.episodes[i];
        out << i << ',' << e.steps_survived << ',' << format_number(e.steps_survived * h) << ','
            << rl::to_string(e.terminal_reason) << '\n';
    }
}

void write_fit_result(std::ostream& out, const sysid::FitResult& result) {
    out << "I=" << format_number(result.params.I) << '\n'
        << "b=" << format_number(result.params.b) << '\n'
        << "theta0=" << format_number(result.theta0) << '\n'
        << "theta_dot0=" << format_number(result.theta_dot0) << '\n'
        << "rss=" << format_number(result.rss) << '\n'
        << "iterations=" << result.iterations << '\n'
        << "converged=" << (result.converged ? "true" : "false") << '\n';
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace pendq::io
