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

#ifndef PENDQ_NELDER_MEAD_HPP
#define PENDQ_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace pendq {

template <typename Scalar = double>
struct SimplexOptions {
    int max_iterations = 2000;
    /// Converged when every vertex is within this relative distance of the best one.
    Scalar tolerance = Scalar(1e-10);
    /// Per-coordinate offsets of the initial simplex vertices.
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> initial_step;
};

template <typename Scalar = double>
struct SimplexResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    Scalar value;
    int iterations = 0;
    bool converged = false;
};

/// Relative spread of the simplex around its best vertex.
template <typename Scalar>
Scalar simplex_spread(const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& vertices, std::size_t best) {
    Scalar spread(0);
    const auto& xb = vertices[best];
    for (const auto& v : vertices)
        for (Eigen::Index i = 0; i < v.size(); ++i)
            spread = std::max(spread, std::abs(v(i) - xb(i)) / std::max(Scalar(1), std::abs(xb(i))));
    return spread;
}

/**
 * Derivative-free minimization with the Nelder-Mead simplex (standard
 * reflection 1, expansion 2, contraction 1/2, shrink 1/2). Non-finite
 * objective values are treated as +inf, so constraints can be expressed by
 * returning infinity.
 */
template <typename Scalar, typename Objective>
SimplexResult<Scalar> nelder_mead(Objective&& f, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x0,
                                  const SimplexOptions<Scalar>& opts) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = x0.size();
    auto eval = [&f](const Vec& x) {
        const Scalar v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<Scalar>::infinity();
    };

    std::vector<Vec> pts(static_cast<std::size_t>(n + 1), x0);
    std::vector<Scalar> vals(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar step = opts.initial_step.size() == n ? opts.initial_step(i) : Scalar(0.05);
        pts[static_cast<std::size_t>(i + 1)](i) += step;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(pts.size());
    SimplexResult<Scalar> result;
    for (result.iterations = 0; result.iterations < opts.max_iterations; ++result.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&vals](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
        if (simplex_spread(pts, best) < opts.tolerance) {
            result.converged = true;
            break;
        }

        Vec centroid = Vec::Zero(n);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<Scalar>(n);

        const Vec reflected = centroid + (centroid - pts[worst]);
        const Scalar f_r = eval(reflected);
        if (f_r < vals[best]) {
            const Vec expanded = centroid + Scalar(2) * (centroid - pts[worst]);
            const Scalar f_e = eval(expanded);
            if (f_e < f_r) {
                pts[worst] = expanded, vals[worst] = f_e;
            } else {
                pts[worst] = reflected, vals[worst] = f_r;
            }
            continue;
        }
        if (f_r < vals[second]) {
            pts[worst] = reflected, vals[worst] = f_r;
            continue;
        }
        // contraction, outside if the reflection improved on the worst point
        const bool outside = f_r < vals[worst];
        const Vec contracted = outside ? Vec(centroid + Scalar(0.5) * (reflected - centroid))
                                       : Vec(centroid + Scalar(0.5) * (pts[worst] - centroid));
        const Scalar f_c = eval(contracted);
        if (f_c < (outside ? f_r : vals[worst])) {
            pts[worst] = contracted, vals[worst] = f_c;
            continue;
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + Scalar(0.5) * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const std::size_t idx = static_cast<std::size_t>(it - vals.begin());
    result.x = pts[idx];
    result.value = *it;
    return result;
}

}  // namespace pendq

#endif  // PENDQ_NELDER_MEAD_HPP
