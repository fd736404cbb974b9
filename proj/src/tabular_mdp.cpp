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

#include "pendq/tabular_mdp.hpp"

#include <cmath>
#include <random>

#include "pendq/errors.hpp"
#include "pendq/rl.hpp"

namespace pendq::rl {

TabularMdp::TabularMdp(int n_states, int n_actions) : states(n_states), actions(n_actions) {
    if (n_states <= 0 || n_actions <= 0) throw ValidationError("MDP needs at least one state and one action");
    if (n_states > 100) throw ValidationError("oracle MDPs are limited to 100 states");
    outcomes.resize(static_cast<std::size_t>(n_states * n_actions));
}

void TabularMdp::add(int s, int a, int next, double probability, double reward) {
    if (s < 0 || s >= states || next < 0 || next >= states || a < 0 || a >= actions)
        throw ContractError("MDP transition index out of range");
    outcomes[static_cast<std::size_t>(s * actions + a)].push_back({next, probability, reward});
}

void TabularMdp::validate() const {
    for (const auto& list : outcomes) {
        double total = 0.0;
        for (const auto& o : list) total += o.probability;
        if (std::abs(total - 1.0) > 1e-12) throw ValidationError("MDP transition probabilities must sum to 1");
    }
}

QMatrix oracle_value_iteration(const TabularMdp& mdp, double gamma, double tolerance, int max_sweeps) {
    mdp.validate();
    QMatrix q = QMatrix::Zero(mdp.states, mdp.actions);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const Eigen::VectorXd v = q.rowwise().maxCoeff();
        QMatrix next(mdp.states, mdp.actions);
        for (int s = 0; s < mdp.states; ++s)
            for (int a = 0; a < mdp.actions; ++a) {
                double value = 0.0;
                for (const auto& o : mdp.at(s, a)) value += o.probability * (o.reward + gamma * v(o.next));
                next(s, a) = value;
            }
        const double change = (next - q).cwiseAbs().maxCoeff();
        q = std::move(next);
        if (change < tolerance) break;
    }
    return q;
}

QMatrix q_learning_on_mdp(const TabularMdp& mdp, double gamma, std::int64_t steps, std::uint64_t seed) {
    mdp.validate();
    QMatrix q = QMatrix::Zero(mdp.states, mdp.actions);
    Eigen::MatrixXd visits = Eigen::MatrixXd::Zero(mdp.states, mdp.actions);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_action(0, mdp.actions - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    int s = 0;
    for (std::int64_t t = 0; t < steps; ++t) {
        const int a = pick_action(rng);
        const auto& list = mdp.at(s, a);
        double u = unit(rng);
        std::size_t k = 0;
        while (k + 1 < list.size() && u >= list[k].probability) u -= list[k++].probability;
        const auto& o = list[k];

        const double alpha = 1.0 / (visits(s, a) += 1.0);
        q(s, a) = q_learning_target_blend(q(s, a), o.reward, q.row(o.next).maxCoeff(), alpha, gamma);
        s = o.next;
    }
    return q;
}

}  // namespace pendq::rl
