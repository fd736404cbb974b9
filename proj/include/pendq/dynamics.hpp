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

#ifndef PENDQ_DYNAMICS_HPP
#define PENDQ_DYNAMICS_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "pendq/errors.hpp"

namespace pendq {

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
    return deg * (std::numbers::pi_v<Scalar> / Scalar(180));
}

template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
    return rad * (Scalar(180) / std::numbers::pi_v<Scalar>);
}

/// Failure limits on the pendulum angle (degrees) and flange displacement (m).
inline constexpr double kPhiLimitDeg = 11.0;
inline constexpr double kFlangeLimit = 0.22;

/**
 * Physical constants of the pendulum and encoder rotor.
 *
 * I: moment of inertia about the rotation axis [kg m^2]
 * b: viscous friction coefficient [N m s/rad]
 * m: pendulum mass [kg]
 * g: gravity acceleration [m/s^2]
 * l: distance from the centre of mass to the axis [m]
 */
template <typename Scalar = double>
struct PendulumParams {
    Scalar I;
    Scalar b;
    Scalar m;
    Scalar g;
    Scalar l;

    /// 5 cm / 50 g pendulum with I chosen so that mgl/I = 70.18 s^-2,
    /// which gives a 0.75 s small-angle period.
    static PendulumParams defaults() {
        const Scalar m = Scalar(0.05), g = Scalar(9.81), l = Scalar(0.05);
        return {m * g * l / Scalar(70.18), Scalar(6e-5), m, g, l};
    }

    Scalar mgl() const { return m * g * l; }

    bool valid() const {
        using std::isfinite;
        return isfinite(I) && isfinite(b) && isfinite(m) && isfinite(g) && isfinite(l) &&
               I > 0 && m > 0 && l > 0 && g > 0 && b >= 0;
    }

    void validate() const {
        if (!valid()) throw ValidationError("pendulum parameters require I, m, g, l > 0 and b >= 0");
    }
};

/// s = [x, x_dot, phi, phi_dot]: flange displacement/velocity and pendulum
/// angle/rate measured from the upright position.
template <typename Scalar = double>
using ContinuousState = Eigen::Matrix<Scalar, 4, 1>;

enum StateIndex : Eigen::Index { kX = 0, kXDot = 1, kPhi = 2, kPhiDot = 3 };

template <typename Scalar>
ContinuousState<Scalar> make_state(Scalar x, Scalar x_dot, Scalar phi, Scalar phi_dot) {
    ContinuousState<Scalar> s;
    s << x, x_dot, phi, phi_dot;
    return s;
}

/// A measured (or simulated) pendulum angle theta, taken from the hanging
/// position, so that theta + phi = pi.
template <typename Scalar = double>
struct OscillationSample {
    Scalar t;
    Scalar theta;
};

/// Continuous-time system matrix of the flange/pendulum model linearized
/// about the upright equilibrium.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> state_matrix(const PendulumParams<Scalar>& p) {
    Eigen::Matrix<Scalar, 4, 4> a = Eigen::Matrix<Scalar, 4, 4>::Zero();
    a(kX, kXDot) = Scalar(1);
    a(kPhi, kPhiDot) = Scalar(1);
    a(kPhiDot, kPhi) = p.mgl() / p.I;
    a(kPhiDot, kPhiDot) = -p.b / p.I;
    return a;
}

/// Input column: the flange acceleration drives x_dot directly and tips the
/// pendulum with gain -ml/I.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> input_matrix(const PendulumParams<Scalar>& p) {
    Eigen::Matrix<Scalar, 4, 1> bcol = Eigen::Matrix<Scalar, 4, 1>::Zero();
    bcol(kXDot) = Scalar(1);
    bcol(kPhiDot) = -p.m * p.l / p.I;
    return bcol;
}

/// One explicit Euler step of the linearized model under the achieved
/// flange acceleration u_actual.
template <typename Derived, typename Scalar>
ContinuousState<Scalar> linearized_step(const Eigen::MatrixBase<Derived>& s, Scalar u_actual,
                                        const PendulumParams<Scalar>& p, Scalar h) {
    using std::isfinite;
    if (!s.allFinite() || !isfinite(u_actual) || !isfinite(h))
        throw ModelDomainError("linearized_step: non-finite input");
    if (!(h > 0)) throw ModelDomainError("linearized_step: step must be positive");
    p.validate();
    return s + h * (state_matrix(p) * s + input_matrix(p) * u_actual);
}

/// Angular acceleration of the freely swinging, viscously damped pendulum.
template <typename Scalar>
Scalar free_oscillation_rhs(Scalar theta, Scalar theta_dot, const PendulumParams<Scalar>& p) {
    using std::sin;
    return -(p.b * theta_dot + p.mgl() * sin(theta)) / p.I;
}

/// Small-angle period about the hanging equilibrium.
template <typename Scalar>
Scalar natural_period(const PendulumParams<Scalar>& p) {
    using std::sqrt;
    return Scalar(2) * std::numbers::pi_v<Scalar> * sqrt(p.I / p.mgl());
}

/// Kinetic plus potential energy, zero at rest in the hanging position.
template <typename Scalar>
Scalar pendulum_energy(Scalar theta, Scalar theta_dot, const PendulumParams<Scalar>& p) {
    using std::cos;
    return Scalar(0.5) * p.I * theta_dot * theta_dot + p.mgl() * (Scalar(1) - cos(theta));
}

/// Classic fixed-step RK4 on (theta, theta_dot).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> rk4_free_oscillation_step(const Eigen::Matrix<Scalar, 2, 1>& y,
                                                      const PendulumParams<Scalar>& p, Scalar h) {
    auto f = [&p](const Eigen::Matrix<Scalar, 2, 1>& v) {
        return Eigen::Matrix<Scalar, 2, 1>(v(1), free_oscillation_rhs(v(0), v(1), p));
    };
    const Eigen::Matrix<Scalar, 2, 1> k1 = f(y);
    const Eigen::Matrix<Scalar, 2, 1> k2 = f(y + Scalar(0.5) * h * k1);
    const Eigen::Matrix<Scalar, 2, 1> k3 = f(y + Scalar(0.5) * h * k2);
    const Eigen::Matrix<Scalar, 2, 1> k4 = f(y + h * k3);
    return y + (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

template <typename Scalar = double>
struct FreeOscillation {
    std::vector<OscillationSample<Scalar>> samples;
    /// Set when h exceeds a twentieth of the natural period; the trace is
    /// still produced.
    bool coarse_step = false;
};

/// Number of samples in a fixed-step trace of the given duration, counting t = 0.
template <typename Scalar>
std::size_t trace_length(Scalar duration, Scalar h) {
    using std::floor;
    return static_cast<std::size_t>(floor(duration / h + Scalar(1e-9))) + 1;
}

template <typename Scalar>
FreeOscillation<Scalar> simulate_free_oscillation(const PendulumParams<Scalar>& p, Scalar theta0,
                                                  Scalar theta_dot0, Scalar h, Scalar duration) {
    using std::isfinite;
    p.validate();
    if (!(h > 0) || !isfinite(h)) throw ValidationError("simulate_free_oscillation: h must be positive");
    if (!(duration > h) || !isfinite(duration))
        throw ValidationError("simulate_free_oscillation: duration must exceed the step");
    if (!isfinite(theta0) || !isfinite(theta_dot0))
        throw ModelDomainError("simulate_free_oscillation: non-finite initial condition");

    FreeOscillation<Scalar> out;
    out.coarse_step = h > natural_period(p) / Scalar(20);
    const std::size_t n = trace_length(duration, h);
    out.samples.reserve(n);
    Eigen::Matrix<Scalar, 2, 1> y(theta0, theta_dot0);
    out.samples.push_back({Scalar(0), theta0});
    for (std::size_t i = 1; i < n; ++i) {
        y = rk4_free_oscillation_step(y, p, h);
        out.samples.push_back({static_cast<Scalar>(i) * h, y(0)});
    }
    return out;
}

/// True once the pendulum leaves +-11 degrees or the flange leaves +-0.22 m.
/// The limits themselves count as failure; non-finite states also fail.
template <typename Derived>
bool is_failure(const Eigen::MatrixBase<Derived>& s) {
    using Scalar = typename Derived::Scalar;
    using std::abs;
    const Scalar phi_limit = deg_to_rad(Scalar(kPhiLimitDeg));
    return !(abs(s(kPhi)) < phi_limit) || !(abs(s(kX)) < Scalar(kFlangeLimit));
}

}  // namespace pendq

#endif  // PENDQ_DYNAMICS_HPP
