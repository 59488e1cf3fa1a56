#include "synergy/scenario.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace synergy {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
    throw ConfigError(key + ": " + what);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        field_error(key, "expected a finite number, got '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::string t = text;
    std::replace(t.begin(), t.end(), ',', ' ');
    std::istringstream is(t);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(parse_number(key, tok));
    return out;
}

Vector3 parse_vector(const std::string& key, const std::string& text) {
    const auto v = parse_list(key, text);
    if (v.size() != 3) field_error(key, "expected 3 components, got " + std::to_string(v.size()));
    return {v[0], v[1], v[2]};
}

long long parse_integer(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        field_error(key, "expected an integer, got '" + text + "'");
    return v;
}

Vector3 unit_axis(const std::string& key, const Vector3& v) {
    if (!(v.norm() > 1e-12)) field_error(key, "axis must be nonzero");
    return v.normalized();
}

template <typename Fn>
void rethrow_as(const std::string& key, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        field_error(key, e.what());
    }
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
    KeyValueFile f;
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(n) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(n) + ": empty key");
        if (f.values_.count(key)) throw ConfigError(key + ": duplicate key (" + origin + ":" + std::to_string(n) + ")");
        f.values_[key] = trim(line.substr(eq + 1));
    }
    return f;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str(), path);
}

std::string_view to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Kinematic: return "kinematic";
        case ScenarioKind::KinematicExtended: return "kinematic-extended";
        case ScenarioKind::Dynamic: return "dynamic";
        case ScenarioKind::DynamicSmooth: return "dynamic-smooth";
        case ScenarioKind::Tracking: return "tracking";
    }
    return "unknown";
}

ReferenceTrajectory ReferenceSpec::build() const {
    const Rotation r0 = attitude_angle == 0.0 ? Rotation::identity() : rot_angle_axis(attitude_angle, attitude_axis);
    switch (kind) {
        case ReferenceKind::Constant: return ReferenceTrajectory::constant(r0);
        case ReferenceKind::Sinusoidal: return ReferenceTrajectory::sinusoidal(r0, amplitude, frequency, phase, offset);
        case ReferenceKind::Piecewise: return ReferenceTrajectory::piecewise_constant(r0, times, values);
    }
    return ReferenceTrajectory::constant(r0);
}

ScenarioConfig ScenarioConfig::from_file(const KeyValueFile& file) {
    ScenarioConfig cfg;
    std::set<std::string> used;
    const auto get = [&](const std::string& key) -> const std::string* {
        const auto it = file.values().find(key);
        if (it == file.values().end()) return nullptr;
        used.insert(key);
        return &it->second;
    };
    const auto number = [&](const std::string& key, double& out) {
        if (const auto* v = get(key)) out = parse_number(key, *v);
    };
    const auto vector = [&](const std::string& key, Vector3& out) {
        if (const auto* v = get(key)) out = parse_vector(key, *v);
    };
    const auto integer = [&](const std::string& key, auto& out, long long lo) {
        if (const auto* v = get(key)) {
            const long long x = parse_integer(key, *v);
            if (x < lo) field_error(key, "must be at least " + std::to_string(lo));
            out = static_cast<std::remove_reference_t<decltype(out)>>(x);
        }
    };
    const auto text = [&](const std::string& key, std::string& out) {
        if (const auto* v = get(key)) {
            if (v->empty()) field_error(key, "must not be empty");
            out = *v;
        }
    };

    if (const auto* v = get("system.kind")) {
        if (*v == "kinematic") cfg.kind = ScenarioKind::Kinematic;
        else if (*v == "kinematic-extended") cfg.kind = ScenarioKind::KinematicExtended;
        else if (*v == "dynamic") cfg.kind = ScenarioKind::Dynamic;
        else if (*v == "dynamic-smooth") cfg.kind = ScenarioKind::DynamicSmooth;
        else if (*v == "tracking") cfg.kind = ScenarioKind::Tracking;
        else field_error("system.kind", "expected kinematic | kinematic-extended | dynamic | dynamic-smooth | tracking, got '" + *v + "'");
    }

    number("potential.k", cfg.potential.k);
    rethrow_as("potential.k", [&] { delta_bar(cfg.potential.k); });
    if (file.has("potential.delta")) {
        number("potential.delta", cfg.potential.delta);
        cfg.delta_follows_gain = false;
    } else {
        cfg.potential.delta = 1.1 * delta_bar(cfg.potential.k);
    }
    for (int i = 0; i < 3; ++i) {
        const std::string key = "potential.axis" + std::to_string(i + 1);
        vector(key, cfg.potential.axes[static_cast<std::size_t>(i)]);
    }
    number("potential.singularity_guard", cfg.potential.singularity_guard);

    number("gains.k_c", cfg.gains.k_c);
    number("gains.k_omega", cfg.gains.k_omega);
    if (file.has("gains.k_s")) {
        number("gains.k_s", cfg.gains.k_s);
        cfg.k_s_follows_omega = false;
    } else {
        cfg.gains.k_s = 50.0 * cfg.gains.k_omega;
    }
    number("gains.k_s_min", cfg.gains.k_s_min);

    number("solver.dt", cfg.solver.dt);
    number("solver.t_max", cfg.solver.t_max);
    integer("solver.j_max", cfg.solver.j_max, 1);
    integer("solver.record_stride", cfg.solver.record_stride, 1);

    if (const auto* v = get("initial.mode")) {
        if (*v == "explicit") cfg.initial.mode = InitialMode::Explicit;
        else if (*v == "worst-case") cfg.initial.mode = InitialMode::WorstCase;
        else if (*v == "random") cfg.initial.mode = InitialMode::Random;
        else field_error("initial.mode", "expected explicit | worst-case | random, got '" + *v + "'");
    }
    vector("initial.axis", cfg.initial.axis);
    cfg.initial.axis = unit_axis("initial.axis", cfg.initial.axis);
    number("initial.angle", cfg.initial.angle);
    integer("initial.axis_count", cfg.initial.axis_count, 1);
    vector("initial.omega", cfg.initial.omega);
    vector("initial.u1", cfg.initial.u1);

    if (const auto* v = get("reference.kind")) {
        ReferenceSpec ref;
        if (*v == "constant") ref.kind = ReferenceKind::Constant;
        else if (*v == "sinusoidal") ref.kind = ReferenceKind::Sinusoidal;
        else if (*v == "piecewise") ref.kind = ReferenceKind::Piecewise;
        else field_error("reference.kind", "expected constant | sinusoidal | piecewise, got '" + *v + "'");
        vector("reference.attitude_axis", ref.attitude_axis);
        ref.attitude_axis = unit_axis("reference.attitude_axis", ref.attitude_axis);
        number("reference.attitude_angle", ref.attitude_angle);
        vector("reference.amplitude", ref.amplitude);
        vector("reference.frequency", ref.frequency);
        vector("reference.phase", ref.phase);
        vector("reference.offset", ref.offset);
        if (const auto* t = get("reference.times")) ref.times = parse_list("reference.times", *t);
        if (const auto* t = get("reference.values")) {
            const auto flat = parse_list("reference.values", *t);
            if (flat.size() % 3 != 0) field_error("reference.values", "expected a multiple of 3 numbers");
            for (std::size_t i = 0; i < flat.size(); i += 3) ref.values.emplace_back(flat[i], flat[i + 1], flat[i + 2]);
        }
        if (ref.kind == ReferenceKind::Piecewise && (ref.times.empty() || ref.times.size() != ref.values.size()))
            field_error("reference.times", "piecewise reference needs one 3-vector in reference.values per breakpoint");
        cfg.reference = ref;
    }
    if (const auto* v = get("tracking.inertia")) {
        const auto u = parse_list("tracking.inertia", *v);
        if (u.size() != 6) field_error("tracking.inertia", "expected 6 upper-triangular entries (Jxx Jxy Jxz Jyy Jyz Jzz)");
        std::copy(u.begin(), u.end(), cfg.inertia.begin());
    }
    if (const auto* v = get("tracking.variant")) {
        if (*v == "hybrid") cfg.tracking_variant = TrackingVariant::Hybrid;
        else if (*v == "smooth") cfg.tracking_variant = TrackingVariant::Smooth;
        else field_error("tracking.variant", "expected hybrid | smooth, got '" + *v + "'");
    }

    if (const auto* v = get("seed")) {
        const long long s = parse_integer("seed", *v);
        if (s < 0) field_error("seed", "must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    integer("analysis.bound_samples", cfg.bound_samples, 1);
    integer("analysis.gradient_samples", cfg.gradient_samples, 1);
    integer("analysis.probe_axes", cfg.probe_axes, 1);
    integer("analysis.dx_samples", cfg.dx_samples, 1);
    number("analysis.audit_slack", cfg.audit_slack);
    number("analysis.c_fraction", cfg.c_fraction);
    number("analysis.convergence_tol", cfg.convergence_tol);
    text("output.trajectory", cfg.trajectory_file);
    text("output.jumps", cfg.jumps_file);
    text("output.summary", cfg.summary_file);

    for (const auto& [key, value] : file.values())
        if (!used.count(key)) field_error(key, "unknown key");

    const bool tracking_keys = std::any_of(file.values().begin(), file.values().end(), [](const auto& kv) {
        return kv.first.rfind("reference.", 0) == 0 || kv.first.rfind("tracking.", 0) == 0;
    });
    if (cfg.kind != ScenarioKind::Tracking && tracking_keys)
        field_error("system.kind", "reference.* and tracking.* keys require system.kind = tracking");
    if (cfg.kind == ScenarioKind::Tracking && !cfg.reference)
        field_error("reference.kind", "tracking scenarios require a reference");
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) { return from_file(KeyValueFile::load(path)); }

void ScenarioConfig::validate(bool simulation) const {
    rethrow_as("potential.k", [&] { delta_bar(potential.k); });
    try {
        potential.validate(simulation);
    } catch (const InvalidWarpGain& e) {
        field_error("potential.k", e.what());
    } catch (const InvalidConfig& e) {
        const std::string what = e.what();
        const std::string key = what.find("axes") != std::string::npos    ? "potential.axis1"
                                : what.find("guard") != std::string::npos ? "potential.singularity_guard"
                                                                          : "potential.delta";
        field_error(key, what);
    }
    const bool smooth = kind == ScenarioKind::DynamicSmooth ||
                        (kind == ScenarioKind::Tracking && tracking_variant == TrackingVariant::Smooth);
    rethrow_as("gains", [&] { gains.validate(smooth); });
    rethrow_as("solver", [&] { solver.validate(); });
    if (initial.mode == InitialMode::Explicit && !(std::abs(initial.angle) <= std::numbers::pi))
        field_error("initial.angle", "must lie in [-pi, pi]");
    if (!(audit_slack >= 0.0 && audit_slack < 1.0)) field_error("analysis.audit_slack", "must lie in [0, 1)");
    if (!(c_fraction > 0.0 && c_fraction < 1.0)) field_error("analysis.c_fraction", "must lie in (0, 1)");
    if (!(convergence_tol > 0.0)) field_error("analysis.convergence_tol", "must be positive");
    if (kind == ScenarioKind::Tracking) {
        if (!reference) field_error("reference.kind", "tracking scenarios require a reference");
        rethrow_as("tracking.inertia", [&] { inertia_matrix(); });
        rethrow_as("reference", [&] { reference->build(); });
    }
}

std::vector<Rotation> ScenarioConfig::initial_attitudes() const {
    std::vector<Rotation> out;
    switch (initial.mode) {
        case InitialMode::Explicit:
            out.push_back(rot_angle_axis(initial.angle, initial.axis));
            break;
        case InitialMode::WorstCase:
            for (const Vector3& v : fibonacci_sphere(initial.axis_count)) out.push_back(rot_angle_axis(std::numbers::pi, v));
            break;
        case InitialMode::Random: {
            std::mt19937_64 rng(seed);
            for (int i = 0; i < initial.axis_count; ++i) out.push_back(random_rotation(rng));
            break;
        }
    }
    return out;
}

InertiaMatrix ScenarioConfig::inertia_matrix() const { return InertiaMatrix::from_upper(inertia); }

const std::vector<std::string>& sweep_parameters() {
    static const std::vector<std::string> names{"k", "delta", "k_c", "k_omega", "k_s", "initial-axis-count"};
    return names;
}

ScenarioConfig with_parameter(const ScenarioConfig& base, const std::string& parameter, double value) {
    ScenarioConfig cfg = base;
    if (parameter == "k") {
        cfg.potential.k = value;
        if (cfg.delta_follows_gain && value > 0.0 && value < kMaxWarpGain) cfg.potential.delta = 1.1 * delta_bar(value);
    } else if (parameter == "delta") {
        cfg.potential.delta = value;
        cfg.delta_follows_gain = false;
    } else if (parameter == "k_c") {
        cfg.gains.k_c = value;
    } else if (parameter == "k_omega") {
        cfg.gains.k_omega = value;
        if (cfg.k_s_follows_omega) cfg.gains.k_s = 50.0 * value;
    } else if (parameter == "k_s") {
        cfg.gains.k_s = value;
        cfg.k_s_follows_omega = false;
    } else if (parameter == "initial-axis-count") {
        if (value != std::floor(value) || value < 1.0)
            field_error("initial.axis_count", "must be a positive integer");
        cfg.initial.axis_count = static_cast<int>(value);
        if (cfg.initial.mode == InitialMode::Explicit) cfg.initial.mode = InitialMode::WorstCase;
    } else {
        std::string names;
        for (const auto& n : sweep_parameters()) names += (names.empty() ? "" : ", ") + n;
        throw UnknownParameter("unknown sweep parameter '" + parameter + "' (expected one of " + names + ")");
    }
    return cfg;
}

bool RunSummary::audits_passed() const { return failures().empty(); }

std::vector<std::string> RunSummary::failures() const {
    std::vector<std::string> out;
    if (flow_monotone && !*flow_monotone) out.emplace_back("lyapunov-flow");
    if (!jump_decrease) out.emplace_back("jump-decrease");
    if (!post_jump_gap) out.emplace_back("post-jump-gap");
    if (!no_consecutive_jumps) out.emplace_back("consecutive-jumps");
    if (decay_rate && !*decay_rate) out.emplace_back("decay-rate");
    if (omega_bound && !*omega_bound) out.emplace_back("omega-bound");
    return out;
}

bool ScenarioResult::passed() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunSummary& r) {
        return r.audits_passed() && r.converged && r.fit && r.fit->lambda > 0.0;
    });
}

namespace {

bool smooth_variant(const ScenarioConfig& cfg) {
    return cfg.kind == ScenarioKind::DynamicSmooth ||
           (cfg.kind == ScenarioKind::Tracking && cfg.tracking_variant == TrackingVariant::Smooth);
}

bool has_rate_state(const ScenarioConfig& cfg) { return cfg.kind != ScenarioKind::Kinematic; }

SystemKind system_kind(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Kinematic: return SystemKind::Kinematic;
        case ScenarioKind::KinematicExtended: return SystemKind::KinematicExtended;
        case ScenarioKind::DynamicSmooth: return SystemKind::DynamicSmooth;
        default: return SystemKind::Dynamic;
    }
}

struct ErrorCoordinates {
    Rotation r;
    Vector3 rate;
    std::optional<Vector3> x_rs;
};

ErrorCoordinates error_coordinates(const ScenarioConfig& cfg, const TrajectorySample& s,
                                   const std::optional<ReferenceTrajectory>& ref) {
    if (cfg.kind == ScenarioKind::Tracking) {
        const TrackingErrors e = sample_errors(s, *ref);
        return {e.r_tilde, e.omega_tilde, s.state.x_rs};
    }
    Vector3 rate = Vector3::Zero();
    if (s.state.omega) rate = *s.state.omega;
    else if (s.state.u1) rate = *s.state.u1;
    return {s.state.r, rate, s.state.x_rs};
}

double lyapunov_value(const ScenarioConfig& cfg, const ScenarioResult& res, const ErrorCoordinates& e, ModeIndex q) {
    try {
        if (cfg.kind == ScenarioKind::Kinematic) return potential_U(e.r, q, cfg.potential);
        if (e.x_rs) {
            const Vector3 x_tilde = *e.x_rs - body_gradient(e.r, q, cfg.potential);
            return lyapunov_Ws(e.r, q, e.rate, x_tilde, cfg.potential, cfg.gains, res.lyapunov);
        }
        return lyapunov_W(e.r, q, e.rate, cfg.potential, cfg.gains, res.lyapunov);
    } catch (const SingularConfiguration&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate(true);
    ScenarioResult res;
    res.bounds = synergism_bounds(cfg.potential, cfg.bound_samples, cfg.seed);
    const bool needs_dx = cfg.kind != ScenarioKind::Kinematic;
    if (needs_dx) res.d_x = estimate_dx_surrogate(cfg.potential, cfg.dx_samples, cfg.seed);

    std::optional<ReferenceTrajectory> ref;
    std::optional<InertiaMatrix> inertia;
    if (cfg.kind == ScenarioKind::Tracking) {
        ref = cfg.reference->build();
        inertia = cfg.inertia_matrix();
    }

    const auto attitudes = cfg.initial_attitudes();
    const bool smooth = smooth_variant(cfg);
    const double b_omega = omega_bound(cfg.kind == ScenarioKind::KinematicExtended ? cfg.initial.u1 : cfg.initial.omega,
                                       cfg.gains, res.bounds.alpha4);
    if (needs_dx) {
        if (smooth) {
            const auto w = smooth_lyapunov_weights(cfg.gains, res.bounds, res.d_x, cfg.potential.delta, b_omega,
                                                   std::sqrt(2.0 * res.bounds.alpha4));
            res.lyapunov = w.weights;
            res.k_s_lower_bound = w.k_s_lower_bound;
        } else {
            const auto lim = admissible_c(cfg.gains, res.bounds, res.d_x, cfg.potential.delta, b_omega);
            res.lyapunov.c = cfg.c_fraction * lim.ceiling();
        }
    }

    for (std::size_t i = 0; i < attitudes.size(); ++i) {
        const Rotation& r0 = attitudes[i];
        HybridTrajectory traj;
        if (cfg.kind == ScenarioKind::Tracking) {
            const Rotation& rd0 = ref->initial_attitude();
            RigidBodyState x0;
            x0.r = r0 * rd0;
            x0.omega = ref->omega(0.0) + rd0.transpose() * cfg.initial.omega;
            traj = simulate_tracking(x0, *ref, *inertia, cfg.potential, cfg.gains, cfg.tracking_variant, cfg.solver);
        } else {
            const SystemKind kind = system_kind(cfg.kind);
            const HybridSystem sys = make_closed_loop(kind, cfg.potential, cfg.gains);
            traj = simulate(sys, initial_state(kind, r0, cfg.potential, cfg.initial.omega, cfg.initial.u1), cfg.solver);
        }

        RunSummary sum;
        sum.run = static_cast<int>(i);
        const UnitQuaternion quat = UnitQuaternion::from_rotation(r0);
        sum.angle = 2.0 * std::atan2(quat.eps().norm(), quat.eta());
        sum.axis = quat.eps().norm() > 0.0 ? Vector3(quat.eps().normalized()) : Vector3::UnitX();
        sum.jumps = static_cast<int>(traj.jumps.size());
        sum.final_dist = traj.diagnostic(traj.final_sample(), "dist");
        sum.final_rate_norm = traj.diagnostic(traj.final_sample(), "omega_norm");
        sum.max_rate_norm = max_diagnostic(traj, "omega_norm");
        try {
            sum.fit = fit_exponential_rate(traj, diagnostic_signal("dist"));
        } catch (const DegenerateWindow& e) {
            sum.fit_error = e.what();
        }

        std::vector<double> lyap;
        lyap.reserve(traj.samples.size());
        for (const auto& s : traj.samples) lyap.push_back(lyapunov_value(cfg, res, error_coordinates(cfg, s, ref), s.state.q));

        const bool guaranteed = !smooth || cfg.gains.k_s > res.k_s_lower_bound;
        if (guaranteed) {
            const double jump_drop = cfg.kind == ScenarioKind::Kinematic ? -1.0 : 0.0;
            sum.flow_monotone = audit_monotone(traj, lyap, 1e-10, jump_drop).passed();
        }
        sum.jump_decrease = audit_jump_decrease(traj, cfg.potential.delta);
        sum.post_jump_gap = audit_post_jump_gap(traj);
        sum.no_consecutive_jumps = check_no_consecutive_jumps(traj);
        if (cfg.kind == ScenarioKind::Kinematic)
            sum.decay_rate = audit_decay_rate(traj, cfg.gains.k_c, res.bounds.alpha3, cfg.audit_slack).violations == 0;
        if (cfg.kind == ScenarioKind::Dynamic || cfg.kind == ScenarioKind::KinematicExtended ||
            (cfg.kind == ScenarioKind::Tracking && !smooth))
            sum.omega_bound = sum.max_rate_norm <= b_omega + 1e-9;
        sum.converged = sum.final_dist < cfg.convergence_tol &&
                        (!has_rate_state(cfg) || sum.final_rate_norm < cfg.convergence_tol);

        res.runs.push_back(sum);
        res.lyapunov_values.push_back(std::move(lyap));
        res.trajectories.push_back(std::move(traj));
    }
    return res;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

void row(std::ostringstream& os, const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << ',' << format_double(v[i]);
}

void push3(std::vector<double>& v, const Vector3& x) { v.insert(v.end(), {x.x(), x.y(), x.z()}); }

void push_rotation(std::vector<double>& v, const Rotation& r) {
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v.push_back(r(i, j));
}

}  // namespace

std::string trajectory_csv(const ScenarioConfig& cfg, const ScenarioResult& res) {
    std::ostringstream os;
    os << "run,t,j,q";
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) os << ",r_" << i << j;
    if (res.trajectories.empty()) return os.str() + '\n';
    const HybridTrajectory& first = res.trajectories.front();
    for (const auto& n : first.diagnostic_names) os << ',' << n;
    const HybridState& x0 = first.samples.front().state;
    if (x0.omega) os << ",omega_x,omega_y,omega_z";
    if (x0.u1) os << ",u1_x,u1_y,u1_z";
    if (x0.x_rs) os << ",xrs_x,xrs_y,xrs_z";
    if (x0.r_ref)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << ",rd_" << i << j;
    os << (cfg.kind == ScenarioKind::Kinematic ? ",lyapunov_U" : smooth_variant(cfg) ? ",lyapunov_Ws" : ",lyapunov_W");
    os << '\n';

    for (std::size_t r = 0; r < res.trajectories.size(); ++r) {
        const auto& traj = res.trajectories[r];
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const auto& s = traj.samples[i];
            os << r << ',' << format_double(s.time.t) << ',' << s.time.j << ',' << s.state.q.value();
            std::vector<double> v;
            push_rotation(v, s.state.r);
            v.insert(v.end(), s.diagnostics.begin(), s.diagnostics.end());
            if (s.state.omega) push3(v, *s.state.omega);
            if (s.state.u1) push3(v, *s.state.u1);
            if (s.state.x_rs) push3(v, *s.state.x_rs);
            if (s.state.r_ref) push_rotation(v, *s.state.r_ref);
            v.push_back(res.lyapunov_values[r][i]);
            row(os, v);
            os << '\n';
        }
    }
    return os.str();
}

std::string jump_log_csv(const ScenarioResult& res) {
    std::ostringstream os;
    os << "run,t,j_before,q_before,q_after,U_before,U_after\n";
    for (std::size_t r = 0; r < res.trajectories.size(); ++r)
        for (const auto& e : res.trajectories[r].jumps)
            os << r << ',' << format_double(e.t) << ',' << e.j_before << ',' << e.q_before.value() << ','
               << e.q_after.value() << ',' << format_double(e.merit_before) << ',' << format_double(e.merit_after)
               << '\n';
    return os.str();
}

namespace {

std::string verdict(const std::optional<bool>& b) { return b ? (*b ? "pass" : "fail") : "n/a"; }
std::string verdict(bool b) { return b ? "pass" : "fail"; }

}  // namespace

std::string summary_csv(const std::vector<RunSummary>& runs) {
    std::ostringstream os;
    os << "run,axis_x,axis_y,axis_z,angle,jumps,lambda,r_squared,final_dist,final_rate_norm,max_rate_norm,"
          "lyapunov_flow,jump_decrease,post_jump_gap,no_consecutive_jumps,decay_rate,omega_bound,converged\n";
    for (const auto& r : runs) {
        os << r.run;
        row(os, {r.axis.x(), r.axis.y(), r.axis.z(), r.angle});
        os << ',' << r.jumps;
        if (r.fit) row(os, {r.fit->lambda, r.fit->r_squared});
        else os << ",nan,nan";
        row(os, {r.final_dist, r.final_rate_norm, r.max_rate_norm});
        os << ',' << verdict(r.flow_monotone) << ',' << verdict(r.jump_decrease) << ',' << verdict(r.post_jump_gap)
           << ',' << verdict(r.no_consecutive_jumps) << ',' << verdict(r.decay_rate) << ',' << verdict(r.omega_bound)
           << ',' << verdict(r.converged) << '\n';
    }
    return os.str();
}

std::string summary_text(const ScenarioConfig& cfg, const ScenarioResult& res) {
    std::ostringstream os;
    os << "system = " << to_string(cfg.kind) << '\n'
       << "runs = " << res.runs.size() << '\n'
       << "alpha3 = " << format_double(res.bounds.alpha3) << '\n'
       << "alpha4 = " << format_double(res.bounds.alpha4) << '\n';
    if (cfg.kind != ScenarioKind::Kinematic) os << "d_x = " << format_double(res.d_x) << '\n';
    if (smooth_variant(cfg))
        os << "c1 = " << format_double(res.lyapunov.c1) << '\n'
           << "c2 = " << format_double(res.lyapunov.c2) << '\n'
           << "k_s_lower_bound = " << format_double(res.k_s_lower_bound) << '\n';
    else if (cfg.kind != ScenarioKind::Kinematic)
        os << "c = " << format_double(res.lyapunov.c) << '\n';
    for (const auto& r : res.runs) {
        os << "run " << r.run << ": jumps = " << r.jumps;
        if (r.fit) os << ", lambda = " << format_double(r.fit->lambda) << ", r2 = " << format_double(r.fit->r_squared);
        else os << ", fit = " << r.fit_error;
        os << ", final_dist = " << format_double(r.final_dist) << ", final_rate = " << format_double(r.final_rate_norm)
           << ", converged = " << verdict(r.converged);
        const auto f = r.failures();
        if (!f.empty()) {
            os << ", failed:";
            for (const auto& s : f) os << ' ' << s;
        }
        os << '\n';
    }
    os << "passed = " << (res.passed() ? "true" : "false") << '\n';
    return os.str();
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                                const std::vector<double>& values) {
    if (values.empty()) throw UnknownParameter("sweep for '" + parameter + "' needs at least one value");
    std::vector<ScenarioConfig> configs;
    for (double v : values) {
        configs.push_back(with_parameter(cfg, parameter, v));
        configs.back().validate(true);
    }
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        SweepRow row;
        row.value = values[i];
        try {
            const ScenarioResult res = run_scenario(configs[i]);
            row.runs = static_cast<int>(res.runs.size());
            row.min_lambda = std::numeric_limits<double>::infinity();
            row.min_r_squared = std::numeric_limits<double>::infinity();
            row.audits_passed = true;
            row.converged = true;
            for (const auto& r : res.runs) {
                row.min_lambda = std::min(row.min_lambda, r.fit ? r.fit->lambda : std::nan(""));
                row.min_r_squared = std::min(row.min_r_squared, r.fit ? r.fit->r_squared : std::nan(""));
                if (!r.fit) row.min_lambda = row.min_r_squared = std::nan("");
                row.max_final_dist = std::max(row.max_final_dist, r.final_dist);
                row.max_final_rate_norm = std::max(row.max_final_rate_norm, r.final_rate_norm);
                row.total_jumps += r.jumps;
                row.audits_passed = row.audits_passed && r.audits_passed();
                row.converged = row.converged && r.converged;
            }
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "parameter,value,runs,min_lambda,min_r_squared,max_final_dist,max_final_rate_norm,total_jumps,"
          "audits_passed,converged,error\n";
    for (const auto& r : rows) {
        os << parameter << ',' << format_double(r.value) << ',' << r.runs;
        row(os, {r.min_lambda, r.min_r_squared, r.max_final_dist, r.max_final_rate_norm});
        os << ',' << r.total_jumps << ',' << verdict(r.audits_passed) << ',' << verdict(r.converged) << ',';
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        os << err << '\n';
    }
    return os.str();
}

std::vector<std::string> VerificationResult::failures() const {
    std::vector<std::string> out;
    if (synergism.sandwich_violations > 0)
        out.push_back("synergism: quadratic sandwich violated on " + std::to_string(synergism.sandwich_violations) + " pairs");
    if (synergism.gradient_violations > 0)
        out.push_back("synergism: gradient sandwich violated on " + std::to_string(synergism.gradient_violations) + " pairs");
    if (synergism.domain_violations > 0)
        out.push_back("synergism: flow set reaches the singular set on " + std::to_string(synergism.domain_violations) + " pairs");
    for (const auto& f : gap.failures()) out.push_back("gap-probe: " + f);
    if (!(gradient.max_relative_error < gradient_tolerance))
        out.push_back("gradient-check: max relative error " + format_double(gradient.max_relative_error) + " >= " +
                      format_double(gradient_tolerance));
    return out;
}

VerificationResult run_verification(const ScenarioConfig& cfg) {
    cfg.validate(false);
    VerificationResult v;
    v.bounds = synergism_bounds(cfg.potential, cfg.bound_samples, cfg.seed);
    v.synergism = verify_exp_synergism(cfg.potential, v.bounds, cfg.bound_samples, cfg.seed + 1, cfg.audit_slack);
    const auto modes = ModeIndex::all();
    v.gap = probe_singular_gap(cfg.potential, fibonacci_sphere(cfg.probe_axes), {modes.begin(), modes.end()});
    v.gradient = gradient_check(cfg.potential, cfg.gradient_samples, cfg.seed + 2);
    return v;
}

}  // namespace synergy
