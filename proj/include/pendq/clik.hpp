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

#ifndef PENDQ_CLIK_HPP
#define PENDQ_CLIK_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pendq/errors.hpp"

namespace pendq {

// Planar arms with two or three joints; the task space has as many
// coordinates as there are joints, so the Jacobian is always square.
inline constexpr Eigen::Index kMaxJoints = 3;

template <typename Scalar>
using JointVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxJoints, 1>;
template <typename Scalar>
using TaskVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1, 0, kMaxJoints, 1>;
template <typename Scalar>
using TaskMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxJoints, kMaxJoints>;

/**
 * Planar serial arm. With two links the task is the flange position (x, y);
 * with three links the task is (x, y, orientation).
 */
template <typename Scalar = double>
struct ManipulatorModel {
    JointVector<Scalar> link_lengths;

    static ManipulatorModel planar(const std::vector<Scalar>& lengths) {
        ManipulatorModel model;
        model.link_lengths = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(
            lengths.data(), static_cast<Eigen::Index>(lengths.size()));
        model.validate();
        return model;
    }

    Eigen::Index dof() const { return link_lengths.size(); }
    Eigen::Index task_dim() const { return link_lengths.size(); }

    void validate() const {
        if (dof() < 2 || dof() > kMaxJoints)
            throw ValidationError("manipulator: only 2 or 3 planar links are supported");
        if (!link_lengths.allFinite() || (link_lengths.array() <= Scalar(0)).any())
            throw ValidationError("manipulator: link lengths must be positive");
    }
};

template <typename Scalar = double>
struct JointState {
    JointVector<Scalar> q;
    JointVector<Scalar> q_dot;
};

/// Diagonal proportional and derivative gains.
template <typename Scalar = double>
struct Gains {
    TaskVector<Scalar> kp;
    TaskVector<Scalar> kd;

    static Gains uniform(Scalar kp, Scalar kd, Eigen::Index dim) {
        return {TaskVector<Scalar>::Constant(dim, kp), TaskVector<Scalar>::Constant(dim, kd)};
    }

    void validate() const {
        if (kp.size() != kd.size()) throw ContractError("gains: kp and kd differ in size");
        if (!kp.allFinite() || !kd.allFinite() || (kp.array() <= Scalar(0)).any() ||
            (kd.array() <= Scalar(0)).any())
            throw ValidationError("gains: diagonal entries must be positive");
    }
};

template <typename Scalar = double>
struct TrackingError {
    TaskVector<Scalar> e;
    TaskVector<Scalar> e_dot;

    static TrackingError zero(Eigen::Index dim) {
        return {TaskVector<Scalar>::Zero(dim), TaskVector<Scalar>::Zero(dim)};
    }
};

namespace detail {

template <typename Scalar, typename Derived>
void check_joint_size(const ManipulatorModel<Scalar>& model, const Eigen::MatrixBase<Derived>& v,
                      const char* what) {
    if (v.size() != model.dof())
        throw ContractError(std::string(what) + ": expected " + std::to_string(model.dof()) +
                            " entries, got " + std::to_string(v.size()));
}

template <typename Scalar, typename Derived>
void check_task_size(const ManipulatorModel<Scalar>& model, const Eigen::MatrixBase<Derived>& v,
                     const char* what) {
    if (v.size() != model.task_dim())
        throw ContractError(std::string(what) + ": expected task dimension " +
                            std::to_string(model.task_dim()) + ", got " + std::to_string(v.size()));
}

/// Absolute link angles: sum of the joint angles up to and including link k.
template <typename Derived>
JointVector<typename Derived::Scalar> cumulative(const Eigen::MatrixBase<Derived>& v) {
    JointVector<typename Derived::Scalar> out(v.size());
    typename Derived::Scalar acc(0);
    for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = (acc += v(k));
    return out;
}

}  // namespace detail

template <typename Scalar, typename Derived>
TaskVector<Scalar> forward_kinematics(const ManipulatorModel<Scalar>& model,
                                      const Eigen::MatrixBase<Derived>& q) {
    using std::cos;
    using std::sin;
    detail::check_joint_size(model, q, "forward_kinematics");
    const JointVector<Scalar> abs_angle = detail::cumulative(q);
    TaskVector<Scalar> p = TaskVector<Scalar>::Zero(model.task_dim());
    for (Eigen::Index k = 0; k < model.dof(); ++k) {
        p(0) += model.link_lengths(k) * cos(abs_angle(k));
        p(1) += model.link_lengths(k) * sin(abs_angle(k));
    }
    if (model.task_dim() == 3) p(2) = abs_angle(model.dof() - 1);
    return p;
}

/// Analytic task Jacobian. Column j collects the links distal to joint j.
template <typename Scalar, typename Derived>
TaskMatrix<Scalar> jacobian(const ManipulatorModel<Scalar>& model, const Eigen::MatrixBase<Derived>& q) {
    using std::cos;
    using std::sin;
    detail::check_joint_size(model, q, "jacobian");
    const Eigen::Index n = model.dof();
    const JointVector<Scalar> abs_angle = detail::cumulative(q);
    TaskMatrix<Scalar> jac = TaskMatrix<Scalar>::Zero(model.task_dim(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j; k < n; ++k) {
            jac(0, j) -= model.link_lengths(k) * sin(abs_angle(k));
            jac(1, j) += model.link_lengths(k) * cos(abs_angle(k));
        }
        if (model.task_dim() == 3) jac(2, j) = Scalar(1);
    }
    return jac;
}

/// Time derivative of the Jacobian along the joint velocity q_dot.
template <typename Scalar, typename DerivedQ, typename DerivedQd>
TaskMatrix<Scalar> jacobian_dot(const ManipulatorModel<Scalar>& model, const Eigen::MatrixBase<DerivedQ>& q,
                                const Eigen::MatrixBase<DerivedQd>& q_dot) {
    using std::cos;
    using std::sin;
    detail::check_joint_size(model, q, "jacobian_dot");
    detail::check_joint_size(model, q_dot, "jacobian_dot");
    const Eigen::Index n = model.dof();
    const JointVector<Scalar> abs_angle = detail::cumulative(q);
    const JointVector<Scalar> abs_rate = detail::cumulative(q_dot);
    TaskMatrix<Scalar> jd = TaskMatrix<Scalar>::Zero(model.task_dim(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = j; k < n; ++k) {
            jd(0, j) -= model.link_lengths(k) * cos(abs_angle(k)) * abs_rate(k);
            jd(1, j) -= model.link_lengths(k) * sin(abs_angle(k)) * abs_rate(k);
        }
    }
    return jd;
}

/// Determinant of the Jacobian after scaling every row to unit norm.
template <typename Scalar>
Scalar normalized_determinant(const TaskMatrix<Scalar>& jac) {
    TaskMatrix<Scalar> scaled = jac;
    for (Eigen::Index r = 0; r < scaled.rows(); ++r) {
        const Scalar norm = scaled.row(r).norm();
        if (norm > Scalar(0)) scaled.row(r) /= norm;
    }
    return scaled.determinant();
}

inline constexpr double kSingularityThreshold = 1e-8;

/**
 * Second-order closed-loop inverse kinematics:
 *   q_ddot = J^-1 (gamma_cmd + Kd e_dot + Kp e - J_dot q_dot)
 *
 * Throws SingularityError when the row-normalized |det J| is at or below
 * kSingularityThreshold.
 */
template <typename Scalar>
JointVector<Scalar> clik_joint_accel(const ManipulatorModel<Scalar>& model, const JointState<Scalar>& js,
                                     const TaskVector<Scalar>& gamma_cmd, const TrackingError<Scalar>& err,
                                     const Gains<Scalar>& gains) {
    using std::abs;
    detail::check_task_size(model, gamma_cmd, "clik_joint_accel: commanded acceleration");
    detail::check_task_size(model, err.e, "clik_joint_accel: error");
    detail::check_task_size(model, err.e_dot, "clik_joint_accel: error rate");
    detail::check_task_size(model, gains.kp, "clik_joint_accel: kp");
    detail::check_task_size(model, gains.kd, "clik_joint_accel: kd");

    const TaskMatrix<Scalar> jac = jacobian(model, js.q);
    const Scalar det = normalized_determinant(jac);
    if (!(abs(det) > Scalar(kSingularityThreshold)))
        throw SingularityError("clik_joint_accel: Jacobian is singular (|det| = " +
                                   std::to_string(static_cast<double>(abs(det))) + ")",
                               static_cast<double>(abs(det)));

    const TaskVector<Scalar> rhs = gamma_cmd + gains.kd.cwiseProduct(err.e_dot) +
                                   gains.kp.cwiseProduct(err.e) -
                                   jacobian_dot(model, js.q, js.q_dot) * js.q_dot;
    return jac.partialPivLu().solve(rhs);
}

/// Flange acceleration produced by the joint motion: J q_ddot + J_dot q_dot.
template <typename Scalar, typename Derived>
TaskVector<Scalar> eef_accel(const ManipulatorModel<Scalar>& model, const JointState<Scalar>& js,
                             const Eigen::MatrixBase<Derived>& q_ddot) {
    detail::check_joint_size(model, q_ddot, "eef_accel");
    return jacobian(model, js.q) * q_ddot + jacobian_dot(model, js.q, js.q_dot) * js.q_dot;
}

/// Projection of the task acceleration on the base x axis.
template <typename Derived>
typename Derived::Scalar tracking_accel(const Eigen::MatrixBase<Derived>& gamma_actual) {
    if (gamma_actual.size() < 1) throw ContractError("tracking_accel: empty task vector");
    return gamma_actual(0);
}

/// Tracking acceleration with a perfect arm: the closure of the CLIK law
/// reduces to u_cmd + Kd e_dot_x + Kp e_x.
template <typename Scalar>
Scalar ideal_tracking_accel(Scalar u_cmd, const TrackingError<Scalar>& err, const Gains<Scalar>& gains) {
    return u_cmd + gains.kd(0) * err.e_dot(0) + gains.kp(0) * err.e(0);
}

/// Nonsingular resting posture with the flange well inside the workspace.
template <typename Scalar>
JointVector<Scalar> default_home_posture(Eigen::Index dof) {
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    JointVector<Scalar> q(dof);
    if (dof == 2)
        q << -pi / 4, pi / 2;
    else
        q << -pi / 4, pi / 2, -pi / 4;
    return q;
}

/**
 * Arm that tracks a commanded flange acceleration along x through the CLIK
 * law, advancing its joint state by h on every call. A reference flange
 * trajectory is integrated from the commands alongside, and the gap between
 * it and the arm's actual flange is the tracking error.
 *
 * Single owner: holds mutable arm state.
 */
template <typename Scalar = double>
class TrackingChannel {
public:
    TrackingChannel(ManipulatorModel<Scalar> model, Gains<Scalar> gains, JointVector<Scalar> home, Scalar h)
        : model_(std::move(model)), gains_(std::move(gains)), home_(std::move(home)), h_(h) {
        model_.validate();
        gains_.validate();
        detail::check_joint_size(model_, home_, "TrackingChannel: home posture");
        detail::check_task_size(model_, gains_.kp, "TrackingChannel: gains");
        if (!(h_ > Scalar(0))) throw ValidationError("TrackingChannel: step must be positive");
        reset();
    }

    void reset() {
        joints_.q = home_;
        joints_.q_dot = JointVector<Scalar>::Zero(model_.dof());
        ref_pos_ = forward_kinematics(model_, joints_.q);
        ref_vel_ = TaskVector<Scalar>::Zero(model_.task_dim());
    }

    /// Achieved x acceleration for command u_cmd under tracking error err,
    /// after perturbing e and e_dot with N(0, noise_std) per component.
    template <typename Rng>
    Scalar track(Scalar u_cmd, TrackingError<Scalar> err, Scalar noise_std, Rng& rng) {
        detail::check_task_size(model_, err.e, "TrackingChannel: error");
        detail::check_task_size(model_, err.e_dot, "TrackingChannel: error rate");
        if (noise_std > Scalar(0)) {
            std::normal_distribution<Scalar> noise(Scalar(0), noise_std);
            for (Eigen::Index i = 0; i < err.e.size(); ++i) err.e(i) += noise(rng);
            for (Eigen::Index i = 0; i < err.e_dot.size(); ++i) err.e_dot(i) += noise(rng);
        }
        TaskVector<Scalar> gamma_cmd = TaskVector<Scalar>::Zero(model_.task_dim());
        gamma_cmd(0) = u_cmd;

        const JointVector<Scalar> q_ddot = clik_joint_accel(model_, joints_, gamma_cmd, err, gains_);
        const Scalar u_actual = tracking_accel(eef_accel(model_, joints_, q_ddot));

        // semi-implicit Euler for the arm and the reference alike
        joints_.q_dot += h_ * q_ddot;
        joints_.q += h_ * joints_.q_dot;
        ref_vel_ += h_ * gamma_cmd;
        ref_pos_ += h_ * ref_vel_;
        return u_actual;
    }

    /// track() with the error taken from the reference/actual gap.
    template <typename Rng>
    Scalar step(Scalar u_cmd, Scalar noise_std, Rng& rng) {
        return track(u_cmd, reference_error(), noise_std, rng);
    }

    TrackingError<Scalar> reference_error() const {
        return {TaskVector<Scalar>(ref_pos_ - forward_kinematics(model_, joints_.q)),
                TaskVector<Scalar>(ref_vel_ - jacobian(model_, joints_.q) * joints_.q_dot)};
    }

    const JointState<Scalar>& joints() const { return joints_; }
    const ManipulatorModel<Scalar>& model() const { return model_; }
    const Gains<Scalar>& gains() const { return gains_; }

private:
    ManipulatorModel<Scalar> model_;
    Gains<Scalar> gains_;
    JointVector<Scalar> home_;
    Scalar h_;
    JointState<Scalar> joints_;
    TaskVector<Scalar> ref_pos_;
    TaskVector<Scalar> ref_vel_;
};

}  // namespace pendq

#endif  // PENDQ_CLIK_HPP
