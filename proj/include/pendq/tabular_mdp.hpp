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

#ifndef PENDQ_TABULAR_MDP_HPP
#define PENDQ_TABULAR_MDP_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace pendq::rl {

/// Explicit finite MDP used as a correctness oracle for Q-learning.
struct TabularMdp {
    struct Outcome {
        int next;
        double probability;
        double reward;
    };

    int states = 0;
    int actions = 0;
    /// outcomes[s * actions + a] lists the successors of (s, a).
    std::vector<std::vector<Outcome>> outcomes;

    TabularMdp(int n_states, int n_actions);

    void add(int s, int a, int next, double probability, double reward);
    const std::vector<Outcome>& at(int s, int a) const { return outcomes[static_cast<std::size_t>(s * actions + a)]; }

    /// Throws ValidationError when probabilities do not sum to one.
    void validate() const;
};

/// states x actions matrix.
using QMatrix = Eigen::MatrixXd;

/// Bellman optimality iteration until the max-norm change is below tolerance.
QMatrix oracle_value_iteration(const TabularMdp& mdp, double gamma, double tolerance = 1e-10,
                               int max_sweeps = 1000000);

/// Q-learning with uniform-random behaviour and alpha = 1 / visits(s, a),
/// run on one continuing trajectory starting from state 0.
QMatrix q_learning_on_mdp(const TabularMdp& mdp, double gamma, std::int64_t steps, std::uint64_t seed);

}  // namespace pendq::rl

#endif  // PENDQ_TABULAR_MDP_HPP
