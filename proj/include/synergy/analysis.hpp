#pragma once

#include "synergy/controllers.hpp"
#include "synergy/hybrid.hpp"
#include "synergy/potential.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace synergy {

// ---------------------------------------------------------------------------
// Lyapunov functions

struct LyapunovConfig {
    double c = 0.0;   // cross-term weight of W
    double c1 = 0.0;  // cross-term weight of W_s
    double c2 = 0.0;  // filter-error weight of W_s
};

/// W = (k_c/2)U + ½‖ω‖² + c ωᵀx_R.
double lyapunov_W(const Rotation& r, ModeIndex q, const Vector3& omega, const WarpedPotentialConfig& cfg,
                  const ControllerGains& gains, const LyapunovConfig& lyap);

/// W_s = (k_c/2)U + ½‖ω‖² + c₁ x_Rᵀω + (c₂/2)‖x̃_R‖².
double lyapunov_Ws(const Rotation& r, ModeIndex q, const Vector3& omega, const Vector3& x_tilde,
                   const WarpedPotentialConfig& cfg, const ControllerGains& gains, const LyapunovConfig& lyap);

/// ‖ω₀‖ + (k_c/k_ω)√(α₄/2).
double omega_bound(const Vector3& omega0, const ControllerGains& gains, double alpha4);

/// Bounds on the cross-term weight of W.
struct CrossTermLimits {
    double positivity = 0.0;  // 2√(k_c/α₄)
    double flow = 0.0;        // 4k_ck_ωα₃ / (4D_xk_cα₃ + k_ω²α₄)
    double jump = 0.0;        // k_cδ / (8B_ω√(α₄/2))
    double ceiling() const;
};

CrossTermLimits admissible_c(const ControllerGains& gains, const SynergismBounds& bounds, double d_x, double delta,
                             double b_omega);

/// Weights for W_s and the resulting lower bound on k_s.
struct SmoothLyapunovWeights {
    LyapunovConfig weights;
    double k_s_lower_bound = 0.0;  // (k_c + c₂D_x)² / (c₂k_ω)
};

/**
 * c₂ minimizes the k_s lower bound (c₂ = k_c/D_x) subject to half the jump
 * ceiling k_cδ/(8B_x̃²); c₁ is half the smallest of its flow, positivity and
 * jump ceilings.
 */
SmoothLyapunovWeights smooth_lyapunov_weights(const ControllerGains& gains, const SynergismBounds& bounds,
                                              double d_x, double delta, double b_omega, double b_xtilde);

/// 2·max ‖∂x_R/∂R‖_F (finite differences along the body tangent basis) over samples in C.
double estimate_dx_surrogate(const WarpedPotentialConfig& cfg, int samples, std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Trajectory audits

/// Indices (pre, post) of the recorded samples bracketing each jump.
std::vector<std::pair<std::size_t, std::size_t>> jump_sample_pairs(const HybridTrajectory& traj);

struct MonotonicityAudit {
    int flow_intervals = 0;
    int flow_violations = 0;
    double max_flow_increase = -std::numeric_limits<double>::infinity();
    int jumps = 0;
    int jump_violations = 0;
    double min_jump_drop = std::numeric_limits<double>::infinity();
    bool passed() const { return flow_violations == 0 && jump_violations == 0; }
};

/**
 * Checks a scalar series along a trajectory: between consecutive samples of
 * the same flow interval the increase must not exceed `flow_tolerance`, and
 * across each jump the value must drop by more than `required_jump_drop`
 * (disabled when negative).
 */
MonotonicityAudit audit_monotone(const HybridTrajectory& traj, const std::vector<double>& values,
                                 double flow_tolerance, double required_jump_drop);

/// Every jump event satisfies merit_after ≤ merit_before − δ + tol.
bool audit_jump_decrease(const HybridTrajectory& traj, double delta, double tol = 1e-10);

/// Every post-jump sample has gap = 0 (within `tol`).
bool audit_post_jump_gap(const HybridTrajectory& traj, double tol = 1e-12);

struct DecayRateAudit {
    int checked = 0;
    int violations = 0;
    double worst_ratio = 0.0;  // max of (ΔU/Δt) / (−k_cα₃U); ≥ 1 means satisfied
};

/// Sample-wise U̇ ≤ −(1−slack)·k_cα₃·U on flow intervals with U above `floor`.
DecayRateAudit audit_decay_rate(const HybridTrajectory& traj, double k_c, double alpha3, double slack = 0.05,
                                double floor = 1e-12);

/// Largest ‖u(t⁺) − u(t⁻)‖ across jumps, from the u_x, u_y, u_z diagnostics.
double max_input_discontinuity(const HybridTrajectory& traj, const std::string& prefix = "u");

/// Max over samples of ‖ω‖ from the omega_norm diagnostic.
double max_diagnostic(const HybridTrajectory& traj, const std::string& name);

/// Flow-set compliance: every sample has gap ≤ δ + tolerance.
double max_flow_gap(const HybridTrajectory& traj);

// ---------------------------------------------------------------------------
// Rate fitting

struct RateFit {
    double lambda = 0.0;
    double r_squared = 0.0;
    HybridTime window_begin;
    HybridTime window_end;
    int samples = 0;
};

struct RateFitOptions {
    double transient_fraction = 0.1;
    double floor = 1e-12;
};

using SignalSelector = std::function<double(const HybridTrajectory&, const TrajectorySample&)>;

/// Selects a named diagnostic.
SignalSelector diagnostic_signal(std::string name);

/// Least-squares slope of log(signal) against t + j. Throws DegenerateWindow.
RateFit fit_exponential_rate(const HybridTrajectory& traj, const SignalSelector& signal,
                             const RateFitOptions& options = {});

/// Same fit on raw (hybrid time, value) pairs.
RateFit fit_exponential_rate(const std::vector<HybridTime>& times, const std::vector<double>& values,
                             const RateFitOptions& options = {});

// ---------------------------------------------------------------------------
// Potential verification

struct GradientCheckReport {
    int samples = 0;
    double max_relative_error = 0.0;
    double step = 0.0;
};

/// Central finite differences of U along R·exp(±h e_i) against 2·x_R, at seeded (R, q) ∈ C.
GradientCheckReport gradient_check(const WarpedPotentialConfig& cfg, int samples, std::uint64_t seed = 11,
                                   double h = 1e-6);

struct ExpSynergismReport {
    std::int64_t samples = 0;
    std::int64_t pairs = 0;
    std::int64_t flow_pairs = 0;
    // Quadratic sandwich on U.
    std::int64_t sandwich_violations = 0;
    double sandwich_worst_lower = 0.0;  // min of U/|R|² − α₁
    double sandwich_worst_upper = 0.0;  // min of α₂ − U/|R|²
    // Gradient sandwich on C.
    std::int64_t gradient_violations = 0;
    double gradient_ratio_min = 0.0;  // min ‖∇U‖²_F / |R|²
    double gradient_ratio_max = 0.0;
    // C ⊆ 𝒟 on sampled flow pairs.
    std::int64_t domain_violations = 0;
    double domain_worst_margin = 0.0;  // min 1 − |Γ|²
    double slack = 0.05;

    bool passed() const { return sandwich_violations == 0 && gradient_violations == 0 && domain_violations == 0; }
    std::string to_report() const;
};

ExpSynergismReport verify_exp_synergism(const WarpedPotentialConfig& cfg, const SynergismBounds& bounds,
                                        std::int64_t sample_count, std::uint64_t seed = 3, double slack = 0.05);

struct GapProbe {
    Vector3 axis;
    ModeIndex mode;
    double angle = 0.0;
    double eta_q = 0.0;
    double warped_distance = 0.0;  // |Γ(R, q)|_I
    double eps_sq = 0.0;           // ‖ε‖²
    double gap = 0.0;              // U(R, q) − min_m U(R, m)
    double gap_quaternion = 0.0;   // max_m |η_m|
};

struct GapProbeReport {
    double k = 0.0;
    double delta = 0.0;
    double delta_bar = 0.0;
    double eps_sq_floor = 0.0;  // (−1 + √(1 + 4k²)) / 2k²
    std::vector<GapProbe> probes;
    int bracket_failures = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    double worst_margin = std::numeric_limits<double>::infinity();  // min_gap − δ̄

    bool gaps_exceed_delta_bar() const;                   // every observed gap ≥ δ̄
    bool eps_above_floor() const;                         // every ‖ε‖² ≥ floor
    bool delta_exceeds_delta_bar() const { return delta > delta_bar; }
    bool singular_gap_exceeds_delta() const { return min_gap > delta; }  // C ⊆ 𝒟 on the probe set
    bool passed() const {
        return gaps_exceed_delta_bar() && eps_above_floor() && delta_exceeds_delta_bar() &&
               singular_gap_exceeds_delta();
    }
    std::vector<std::string> failures() const;
    std::string to_report() const;
    /// One CSV row per probe.
    std::string to_csv() const;
};

/// `n` nearly uniform unit vectors (Fibonacci lattice).
std::vector<Vector3> fibonacci_sphere(int n);

/**
 * For each axis v and mode q, bisects θ ∈ [π/2, π] for η_q(rot(θ, v)) = 0,
 * i.e. a point where |Γ(R, q)|_I = 1, and records the synergy gap there.
 * Pairs without a sign change are counted as bracket failures.
 */
GapProbeReport probe_singular_gap(const WarpedPotentialConfig& cfg, const std::vector<Vector3>& axes,
                                  const std::vector<ModeIndex>& modes);

}  // namespace synergy
