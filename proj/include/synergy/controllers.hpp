#pragma once

#include "synergy/hybrid.hpp"
#include "synergy/potential.hpp"

#include <string_view>

namespace synergy {

struct ControllerGains {
    double k_c = 1.0;
    double k_omega = 1.0;
    double k_s = 50.0;
    /// Lower bound enforced on k_s when the filtered controller is active.
    double k_s_min = 0.0;

    /// Throws InvalidConfig; `smooth` additionally checks k_s.
    void validate(bool smooth) const;
};

/// u₁ = −k_c x_R(R, q).
Vector3 kinematic_control(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg,
                          const ControllerGains& gains);

/// u̇₁ = −k_ω u₁ − k_c x_R(R, q).
Vector3 kinematic_dynamic_extension_field(const Vector3& u1, const Rotation& r, ModeIndex q,
                                          const WarpedPotentialConfig& cfg, const ControllerGains& gains);

/// u₂ = −k_c x_R(R, q) − k_ω ω.
Vector3 dynamic_control(const Rotation& r, ModeIndex q, const Vector3& omega, const WarpedPotentialConfig& cfg,
                        const ControllerGains& gains);

struct SmoothControl {
    Vector3 u2;
    Vector3 x_rs_dot;
};

/// u₂ = −k_c x_{R,s} − k_ω ω with ẋ_{R,s} = −k_s (x_{R,s} − x_R(R, q)).
SmoothControl smooth_dynamic_control(const Rotation& r, ModeIndex q, const Vector3& omega, const Vector3& x_rs,
                                     const WarpedPotentialConfig& cfg, const ControllerGains& gains);

/// Lowest-index minimizer of U(R0, ·); the initial state then lies in C.
ModeIndex init_mode(const Rotation& r0, const WarpedPotentialConfig& cfg);

enum class SystemKind { Kinematic, KinematicExtended, Dynamic, DynamicSmooth };

std::string_view to_string(SystemKind kind);

/**
 * Closed loop of the given kind with the min-switch on U.
 *
 * Diagnostics: dist (|R|_I), U, gap, omega_norm (‖ω‖ or ‖u₁‖ for the
 * first-order systems), u_x/u_y/u_z (the applied input), xr_x/xr_y/xr_z
 * (x_R at the current mode).
 */
HybridSystem make_closed_loop(SystemKind kind, const WarpedPotentialConfig& cfg, const ControllerGains& gains);

/// Initial state with q₀ = init_mode(R0), x_{R,s}(0) = x_R(R0, q₀), u₁(0) = `u1`.
HybridState initial_state(SystemKind kind, const Rotation& r0, const WarpedPotentialConfig& cfg,
                          const Vector3& omega0 = Vector3::Zero(), const Vector3& u1 = Vector3::Zero());

/// Applied input at a state (u₁ for first-order systems, u₂ otherwise).
Vector3 applied_input(SystemKind kind, const HybridState& x, const WarpedPotentialConfig& cfg,
                      const ControllerGains& gains);

}  // namespace synergy
