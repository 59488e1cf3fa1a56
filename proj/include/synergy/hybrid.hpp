#pragma once

#include "synergy/potential.hpp"
#include "synergy/so3.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace synergy {

/// Hybrid time (t, j): elapsed flow time and number of jumps.
struct HybridTime {
    double t = 0.0;
    int j = 0;

    friend bool operator<(const HybridTime& a, const HybridTime& b) {
        return a.t < b.t || (a.t == b.t && a.j < b.j);
    }
};

/**
 * Continuous and discrete state shared by every closed loop.
 *
 * Only the fields used by the active system are engaged: `omega` for
 * second-order systems, `x_rs` for the filtered controllers, `u1` for the
 * dynamic extension and `r_ref` for reference tracking.
 */
struct HybridState {
    Rotation r;
    ModeIndex q;
    std::optional<Vector3> omega;
    std::optional<Vector3> x_rs;
    std::optional<Vector3> u1;
    std::optional<Rotation> r_ref;
};

/// Right-hand side of the flow. Rotations advance as Ṙ = R[rate]_×.
struct StateRate {
    Vector3 r_rate = Vector3::Zero();
    std::optional<Vector3> r_ref_rate;
    std::optional<Vector3> omega;
    std::optional<Vector3> x_rs;
    std::optional<Vector3> u1;
};

struct SolverConfig {
    double dt = 1e-3;
    double t_max = 20.0;
    int j_max = 100;
    int record_stride = 10;

    /// Throws InvalidConfig.
    void validate() const;
};

struct HybridSystem {
    /// Flow map; the mode in the state is held fixed over a step.
    std::function<StateRate(double t, const HybridState&)> flow;
    std::function<bool(const HybridState&)> in_jump_set;
    std::function<HybridState(const HybridState&)> jump;
    /// Scalar logged before and after every jump (the potential U).
    std::function<double(const HybridState&)> jump_merit;

    std::vector<std::string> diagnostic_names;
    std::function<std::vector<double>(double t, const HybridState&)> diagnostics;
};

struct TrajectorySample {
    HybridTime time;
    HybridState state;
    std::vector<double> diagnostics;
};

struct JumpEvent {
    double t = 0.0;
    int j_before = 0;
    ModeIndex q_before;
    ModeIndex q_after;
    double merit_before = 0.0;
    double merit_after = 0.0;
};

struct HybridTrajectory {
    std::vector<std::string> diagnostic_names;
    std::vector<TrajectorySample> samples;
    std::vector<JumpEvent> jumps;
    double dt = 0.0;
    /// Largest orthonormality error seen on any integrated rotation.
    double max_orthonormality_error = 0.0;

    /// Column of a named diagnostic; throws std::out_of_range if absent.
    std::size_t diagnostic_index(const std::string& name) const;
    double diagnostic(const TrajectorySample& s, const std::string& name) const {
        return s.diagnostics[diagnostic_index(name)];
    }
    const TrajectorySample& final_sample() const { return samples.back(); }
};

/**
 * Fixed-step hybrid simulation.
 *
 * A jump is executed whenever the jump predicate holds at a step boundary
 * (including t = 0), incrementing j with t unchanged; otherwise the state
 * flows for one step. Rotations are advanced by a Runge–Kutta–Munthe-Kaas
 * scheme of order four whose final update is the exact geodesic step, and
 * vector states by classical RK4 over the same stages.
 *
 * Every step is recorded at `record_stride`, and the states immediately
 * before and after each jump are always recorded.
 *
 * Throws ZenoSuspected when j reaches j_max and StateInvariantViolation when
 * an integrated rotation drifts beyond 1e-6 from orthonormality.
 */
HybridTrajectory simulate(const HybridSystem& system, const HybridState& x0, const SolverConfig& cfg);

/// One flow step of length h with the mode frozen.
HybridState flow_step(const HybridSystem& system, double t, const HybridState& x, double h);

/// True iff consecutive jumps are separated by a strictly positive flow interval.
bool check_no_consecutive_jumps(const HybridTrajectory& traj);
bool check_no_consecutive_jumps(const std::vector<JumpEvent>& jumps);

}  // namespace synergy
