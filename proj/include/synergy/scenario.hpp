#pragma once

#include "synergy/analysis.hpp"
#include "synergy/controllers.hpp"
#include "synergy/tracking.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace synergy {

/// Flat `key = value` file with dotted keys; `#` starts a comment.
class KeyValueFile {
public:
    static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");
    static KeyValueFile load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

private:
    std::map<std::string, std::string> values_;
};

enum class ScenarioKind { Kinematic, KinematicExtended, Dynamic, DynamicSmooth, Tracking };

std::string_view to_string(ScenarioKind kind);

enum class InitialMode { Explicit, WorstCase, Random };

struct InitialSpec {
    InitialMode mode = InitialMode::Explicit;
    Vector3 axis = Vector3::UnitX();
    double angle = 3.141592653589793;
    int axis_count = 20;  // worst-case: Fibonacci axes at angle π
    Vector3 omega = Vector3::Zero();
    Vector3 u1 = Vector3::Zero();
};

enum class ReferenceKind { Constant, Sinusoidal, Piecewise };

struct ReferenceSpec {
    ReferenceKind kind = ReferenceKind::Constant;
    Vector3 attitude_axis = Vector3::UnitZ();
    double attitude_angle = 0.0;
    Vector3 amplitude = Vector3::Zero();
    Vector3 frequency = Vector3::Zero();
    Vector3 phase = Vector3::Zero();
    Vector3 offset = Vector3::Zero();
    std::vector<double> times;
    std::vector<Vector3> values;

    ReferenceTrajectory build() const;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Kinematic;
    WarpedPotentialConfig potential;
    ControllerGains gains;
    SolverConfig solver;
    InitialSpec initial;
    std::optional<ReferenceSpec> reference;
    std::array<double, 6> inertia{0.02, 0.0, 0.0, 0.03, 0.0, 0.04};
    TrackingVariant tracking_variant = TrackingVariant::Hybrid;
    std::uint64_t seed = 1;
    bool delta_follows_gain = true;   // potential.delta not given explicitly
    bool k_s_follows_omega = true;    // gains.k_s not given explicitly

    // Analysis settings.
    std::int64_t bound_samples = 100000;
    int gradient_samples = 1000;
    int probe_axes = 100;
    int dx_samples = 10000;
    double audit_slack = 0.05;
    double c_fraction = 0.5;
    double convergence_tol = 1e-6;

    // Output file names, relative to the output directory.
    std::string trajectory_file = "trajectory.csv";
    std::string jumps_file = "jumps.csv";
    std::string summary_file = "summary.csv";

    /**
     * Parses and validates every key. Unknown keys, malformed values and
     * violated invariants raise ConfigError naming the field. When
     * potential.delta is absent it defaults to 1.1·δ̄(k); gains.k_s defaults
     * to 50·k_omega.
     */
    static ScenarioConfig from_file(const KeyValueFile& file);
    static ScenarioConfig load(const std::string& path);

    /// Module-level invariants. `simulation` additionally enforces δ > δ̄.
    void validate(bool simulation) const;

    /// Initial attitudes of the scenario (the error attitude for tracking).
    std::vector<Rotation> initial_attitudes() const;
    InertiaMatrix inertia_matrix() const;
};

/// Keys accepted by `sweep`.
const std::vector<std::string>& sweep_parameters();

/// Copy of `cfg` with a whitelisted parameter replaced. Throws UnknownParameter.
ScenarioConfig with_parameter(const ScenarioConfig& cfg, const std::string& parameter, double value);

struct RunSummary {
    int run = 0;
    Vector3 axis = Vector3::Zero();
    double angle = 0.0;
    int jumps = 0;
    double final_dist = 0.0;
    double final_rate_norm = 0.0;
    double max_rate_norm = 0.0;
    std::optional<RateFit> fit;
    std::string fit_error;
    std::optional<bool> flow_monotone;  // empty when the Lyapunov decrease is not guaranteed
    bool jump_decrease = true;
    bool post_jump_gap = true;
    bool no_consecutive_jumps = true;
    std::optional<bool> decay_rate;
    std::optional<bool> omega_bound;
    bool converged = false;

    bool audits_passed() const;
    std::vector<std::string> failures() const;
};

struct ScenarioResult {
    std::vector<HybridTrajectory> trajectories;
    std::vector<RunSummary> runs;
    SynergismBounds bounds;
    double d_x = 0.0;
    LyapunovConfig lyapunov;
    double k_s_lower_bound = 0.0;
    /// Lyapunov value at every recorded sample, per run.
    std::vector<std::vector<double>> lyapunov_values;

    bool passed() const;
};

/// Runs every initial condition of the scenario and audits each trajectory.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Trajectory CSV of all runs; the first column is the run index.
std::string trajectory_csv(const ScenarioConfig& cfg, const ScenarioResult& result);
std::string jump_log_csv(const ScenarioResult& result);
std::string summary_csv(const std::vector<RunSummary>& runs);
std::string summary_text(const ScenarioConfig& cfg, const ScenarioResult& result);

struct SweepRow {
    double value = 0.0;
    int runs = 0;
    double min_lambda = 0.0;
    double min_r_squared = 0.0;
    double max_final_dist = 0.0;
    double max_final_rate_norm = 0.0;
    int total_jumps = 0;
    bool audits_passed = false;
    bool converged = false;
    std::string error;
};

/// One row per value, in input order. Throws UnknownParameter or ConfigError before any run.
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                                const std::vector<double>& values);
std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

struct VerificationResult {
    SynergismBounds bounds;
    ExpSynergismReport synergism;
    GapProbeReport gap;
    GradientCheckReport gradient;
    double gradient_tolerance = 1e-5;

    std::vector<std::string> failures() const;
    bool passed() const { return failures().empty(); }
};

VerificationResult run_verification(const ScenarioConfig& cfg);

/// Shortest round-trip decimal rendering.
std::string format_double(double v);

}  // namespace synergy
