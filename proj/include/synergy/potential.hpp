#pragma once

#include "synergy/so3.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace synergy {

/// Discrete mode q ∈ {1, …, 6}; modes 4–6 warp along the negated axes of 1–3.
class ModeIndex {
public:
    static constexpr int kCount = 6;

    constexpr ModeIndex() = default;
    /// Throws std::out_of_range outside {1, …, 6}.
    explicit ModeIndex(int q);

    constexpr int value() const { return q_; }
    static std::array<ModeIndex, kCount> all();

    friend constexpr bool operator==(ModeIndex a, ModeIndex b) { return a.q_ == b.q_; }

private:
    int q_ = 1;
};

/// Upper limit of the warp gain, 1/√2.
inline const double kMaxWarpGain = 1.0 / std::sqrt(2.0);

/// Lower bound on the synergy gap admitted by the warp gain `k`.
/// Throws InvalidWarpGain unless 0 < k < 1/√2.
double delta_bar(double k);

struct WarpedPotentialConfig {
    double k = 0.5;
    std::array<Vector3, 3> axes{Vector3::UnitX(), Vector3::UnitY(), Vector3::UnitZ()};
    double delta = 1.1 * delta_bar(0.5);
    double singularity_guard = 1e-12;

    /// k with δ = 1.1·δ̄(k) and the canonical axes.
    static WarpedPotentialConfig with_gain(double k);

    /// Throws InvalidWarpGain / InvalidConfig naming the violated invariant.
    /// With `require_gap_hypothesis` false the check δ > δ̄(k) is skipped so
    /// that verification runs can be pointed at deliberately broken gaps.
    void validate(bool require_gap_hypothesis = true) const;

    /// u_q, with u_{m+3} = −u_m.
    Vector3 axis(ModeIndex q) const;
};

/// 1 − √(1 − |R|_I²).
double potential_V(const Rotation& r);

/// Warp angle 2·arcsin(k|R|_I²).
double warp_angle(const Rotation& r, double k);

/// Γ(R, q) = R · rot(2 arcsin(k|R|_I²), u_q).
Rotation gamma(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg);

/// Quaternion of Γ(R, q) computed from the quaternion of R.
UnitQuaternion warped_quaternion(const UnitQuaternion& r, ModeIndex q, const WarpedPotentialConfig& cfg);

/// U(R, q) = V(Γ(R, q)).
double potential_U(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg);

/// Θ_q(R), the Jacobian factor of the warp.
Matrix3 theta_q(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg);

/**
 * Body-frame gradient x_R(R, q) = ψ(Rᵀ∇U(R, q)).
 *
 * The directional derivative of U along R·exp(s[v]_×) is 2·x_Rᵀv, and
 * ‖∇U‖_F² = 2‖x_R‖². Throws SingularConfiguration when
 * 1 − |Γ(R, q)|_I² falls below the configured guard, which can only
 * happen outside the flow set.
 */
Vector3 body_gradient(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg);

struct MinPotential {
    double value = 0.0;
    /// All modes within the tie tolerance of the minimum, ascending.
    std::vector<ModeIndex> argmin;
    /// Lowest-index minimizer, the deterministic jump target.
    ModeIndex best() const { return argmin.front(); }
};

inline constexpr double kTieTolerance = 1e-12;

MinPotential min_potential(const Rotation& r, const WarpedPotentialConfig& cfg);

/// U(R, q) − min_m U(R, m).
double synergy_gap(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg);

inline bool in_flow_set(double gap, const WarpedPotentialConfig& cfg) { return gap <= cfg.delta; }
inline bool in_jump_set(double gap, const WarpedPotentialConfig& cfg) { return gap >= cfg.delta; }

/// Closed-form lower constant of the quadratic sandwich on U.
double alpha1(double k);
/// Closed-form upper constant of the quadratic sandwich on U.
double alpha2(double k);

struct SynergismBounds {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double alpha3 = 0.0;
    double alpha4 = 0.0;
    double lambda_theta_min = 0.0;
    double lambda_theta_max = 0.0;
    double delta_bar = 0.0;
    std::int64_t sample_count = 0;
    // Extremal witnesses of the eigenvalue search.
    Rotation min_witness;
    ModeIndex min_witness_mode;
    Rotation max_witness;
    ModeIndex max_witness_mode;

    /// `key = value` lines.
    std::string to_report() const;
};

/**
 * Analytic α₁, α₂, δ̄ plus Monte-Carlo extrema of the eigenvalues of Θ_qΘ_qᵀ
 * over `sample_count` Haar samples and all six modes.
 *
 * The gradient constants follow from ‖∇U‖_F² = 2‖x_R‖² and
 * ‖ψ(Γ)‖² = 4|Γ|_I²(1 − |Γ|_I²): α₃ = λ_min·α₁/4, α₄ = λ_max·α₂/8.
 * Results do not depend on `workers`.
 */
SynergismBounds synergism_bounds(const WarpedPotentialConfig& cfg, std::int64_t sample_count,
                                 std::uint64_t seed = 1, unsigned workers = 1);

}  // namespace synergy
