#pragma once

#include "synergy/controllers.hpp"
#include "synergy/hybrid.hpp"

#include <array>
#include <functional>
#include <vector>

namespace synergy {

/// Symmetric positive-definite inertia matrix in kg·m².
class InertiaMatrix {
public:
    /// Throws SingularInertia if J is not symmetric, not positive definite,
    /// or has condition number above 1e10.
    explicit InertiaMatrix(const Matrix3& j);
    static InertiaMatrix diagonal(double jx, double jy, double jz);
    /// From the upper triangle (Jxx, Jxy, Jxz, Jyy, Jyz, Jzz).
    static InertiaMatrix from_upper(const std::array<double, 6>& upper);

    const Matrix3& matrix() const { return j_; }
    const Matrix3& inverse() const { return j_inv_; }

private:
    Matrix3 j_;
    Matrix3 j_inv_;
};

struct RigidBodyState {
    Rotation r;  // body to inertial
    Vector3 omega = Vector3::Zero();  // body frame, rad/s
};

struct RigidBodyRate {
    Vector3 r_rate;  // Ṙ = R[r_rate]_×
    Vector3 omega_dot;
};

/// Ṙ = R[Ω]_×, JΩ̇ = [JΩ]_×Ω + τ.
RigidBodyRate body_dynamics(const RigidBodyState& state, const Vector3& tau, const InertiaMatrix& j);

/**
 * Desired attitude signal Ṙ_d = R_d[Ω_d(t)]_×.
 *
 * R_d(t) itself is integrated with the plant; this type holds R_d(0) and
 * the angular velocity profile.
 */
class ReferenceTrajectory {
public:
    using Signal = std::function<Vector3(double)>;

    /// `omega_dot` may be empty, in which case central differences with step
    /// `fd_step` are used. The pair is cross-checked on [0, horizon].
    ReferenceTrajectory(Rotation r0, Signal omega, Signal omega_dot, double fd_step = 1e-4, double horizon = 10.0);

    /// R_d ≡ R_d(0), Ω_d ≡ 0.
    static ReferenceTrajectory constant(const Rotation& r0 = Rotation::identity());
    /// Ω_d,i(t) = amplitude_i·sin(frequency_i·t + phase_i) + offset_i.
    static ReferenceTrajectory sinusoidal(const Rotation& r0, const Vector3& amplitude, const Vector3& frequency,
                                          const Vector3& phase, const Vector3& offset);
    /// Ω_d(t) = values[i] for t ∈ [times[i], times[i+1]); Ω̇_d = 0 almost everywhere.
    static ReferenceTrajectory piecewise_constant(const Rotation& r0, std::vector<double> times,
                                                  std::vector<Vector3> values);

    const Rotation& initial_attitude() const { return r0_; }
    Vector3 omega(double t) const { return omega_(t); }
    Vector3 omega_dot(double t) const;

    /// Max deviation between Ω̇_d and a central difference of Ω_d over
    /// `samples` points of [0, horizon] (jump points of piecewise signals skipped).
    double consistency_error(double horizon, int samples = 200) const;

private:
    Rotation r0_;
    Signal omega_;
    Signal omega_dot_;
    double fd_step_;
    std::vector<double> breakpoints_;
};

struct TrackingErrors {
    Rotation r_tilde;     // R R_dᵀ
    Vector3 omega_tilde;  // R_d(Ω − Ω_d)
};

TrackingErrors tracking_errors(const RigidBodyState& state, const Rotation& r_d, const Vector3& omega_d);

/// τ = −[JΩ]_×Ω + J(Ω̇_d − [Ω_d]_×Ω + R_dᵀu_c).
Vector3 tracking_torque(const RigidBodyState& state, const Rotation& r_d, const Vector3& omega_d,
                        const Vector3& omega_d_dot, const Vector3& u_c, const InertiaMatrix& j);

enum class TrackingVariant { Hybrid, Smooth };

/**
 * Closed loop on (R, Ω, R_d, q[, x_{R,s}]).
 *
 * The flow and jump sets are evaluated on (R̃, q). Diagnostics add the
 * error coordinates (R̃ entries, ω̃), the torque, R_d entries and Ω_d.
 */
HybridSystem make_tracking_system(const ReferenceTrajectory& ref, const InertiaMatrix& j,
                                  const WarpedPotentialConfig& cfg, const ControllerGains& gains,
                                  TrackingVariant variant);

/// Initial state for plant attitude/rate `x0`, with q from the initial error.
HybridState tracking_initial_state(const RigidBodyState& x0, const ReferenceTrajectory& ref,
                                   const WarpedPotentialConfig& cfg, const ControllerGains& gains,
                                   TrackingVariant variant);

HybridTrajectory simulate_tracking(const RigidBodyState& x0, const ReferenceTrajectory& ref, const InertiaMatrix& j,
                                   const WarpedPotentialConfig& cfg, const ControllerGains& gains,
                                   TrackingVariant variant, const SolverConfig& solver);

/// Error coordinates of a recorded tracking sample.
TrackingErrors sample_errors(const TrajectorySample& s, const ReferenceTrajectory& ref);

}  // namespace synergy
