#include "synergy/hybrid.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace synergy {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidConfig("solver.dt must be positive");
    if (!(t_max > 0.0)) throw InvalidConfig("solver.t_max must be positive");
    if (j_max < 1) throw InvalidConfig("solver.j_max must be at least 1");
    if (record_stride < 1) throw InvalidConfig("solver.record_stride must be at least 1");
}

std::size_t HybridTrajectory::diagnostic_index(const std::string& name) const {
    const auto it = std::find(diagnostic_names.begin(), diagnostic_names.end(), name);
    if (it == diagnostic_names.end()) throw std::out_of_range("no diagnostic named '" + name + "'");
    return static_cast<std::size_t>(it - diagnostic_names.begin());
}

namespace {

// Inverse right-trivialized differential of exp, truncated after the
// Θ² term (sufficient for fourth order).
Vector3 dexp_inv(const Vector3& theta, const Vector3& w) {
    return w + 0.5 * theta.cross(w) + theta.cross(theta.cross(w)) / 12.0;
}

// Stage increments in the Lie algebra (rotations) and in ℝ³ (vectors).
struct Increment {
    Vector3 r = Vector3::Zero();
    Vector3 r_ref = Vector3::Zero();
    Vector3 omega = Vector3::Zero();
    Vector3 x_rs = Vector3::Zero();
    Vector3 u1 = Vector3::Zero();
};

void require_rate(bool state_has, bool rate_has, const char* name) {
    if (state_has != rate_has) {
        std::ostringstream os;
        os << "flow field and state disagree on the presence of '" << name << "'";
        throw StateInvariantViolation(os.str());
    }
}

HybridState stage_state(const HybridState& x0, const Increment& k, double a) {
    HybridState s = x0;
    s.r = x0.r * exp_map(a * k.r);
    if (x0.r_ref) s.r_ref = *x0.r_ref * exp_map(a * k.r_ref);
    if (x0.omega) s.omega = *x0.omega + a * k.omega;
    if (x0.x_rs) s.x_rs = *x0.x_rs + a * k.x_rs;
    if (x0.u1) s.u1 = *x0.u1 + a * k.u1;
    return s;
}

// h·f at a stage, with rotation rates mapped through dexp⁻¹ at the stage offset.
Increment evaluate(const HybridSystem& sys, double t, const HybridState& x0, const Increment* prev, double a,
                   double h) {
    const HybridState s = prev ? stage_state(x0, *prev, a) : x0;
    const StateRate f = sys.flow(t, s);
    require_rate(x0.r_ref.has_value(), f.r_ref_rate.has_value(), "r_ref");
    require_rate(x0.omega.has_value(), f.omega.has_value(), "omega");
    require_rate(x0.x_rs.has_value(), f.x_rs.has_value(), "x_rs");
    require_rate(x0.u1.has_value(), f.u1.has_value(), "u1");
    Increment k;
    const Vector3 zero = Vector3::Zero();
    k.r = h * dexp_inv(prev ? Vector3(a * prev->r) : zero, f.r_rate);
    if (f.r_ref_rate) k.r_ref = h * dexp_inv(prev ? Vector3(a * prev->r_ref) : zero, *f.r_ref_rate);
    if (f.omega) k.omega = h * *f.omega;
    if (f.x_rs) k.x_rs = h * *f.x_rs;
    if (f.u1) k.u1 = h * *f.u1;
    return k;
}

Increment combine(const Increment& k1, const Increment& k2, const Increment& k3, const Increment& k4) {
    Increment out;
    out.r = (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r) / 6.0;
    out.r_ref = (k1.r_ref + 2.0 * k2.r_ref + 2.0 * k3.r_ref + k4.r_ref) / 6.0;
    out.omega = (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega) / 6.0;
    out.x_rs = (k1.x_rs + 2.0 * k2.x_rs + 2.0 * k3.x_rs + k4.x_rs) / 6.0;
    out.u1 = (k1.u1 + 2.0 * k2.u1 + 2.0 * k3.u1 + k4.u1) / 6.0;
    return out;
}

double drift(const HybridState& x) {
    double e = x.r.orthonormality_error();
    if (x.r_ref) e = std::max(e, x.r_ref->orthonormality_error());
    return e;
}

TrajectorySample make_sample(const HybridSystem& sys, const HybridTime& time, const HybridState& x) {
    TrajectorySample s{time, x, {}};
    if (sys.diagnostics) s.diagnostics = sys.diagnostics(time.t, x);
    return s;
}

}  // namespace

HybridState flow_step(const HybridSystem& sys, double t, const HybridState& x, double h) {
    const Increment k1 = evaluate(sys, t, x, nullptr, 0.0, h);
    const Increment k2 = evaluate(sys, t + 0.5 * h, x, &k1, 0.5, h);
    const Increment k3 = evaluate(sys, t + 0.5 * h, x, &k2, 0.5, h);
    const Increment k4 = evaluate(sys, t + h, x, &k3, 1.0, h);
    const Increment total = combine(k1, k2, k3, k4);
    return stage_state(x, total, 1.0);
}

HybridTrajectory simulate(const HybridSystem& sys, const HybridState& x0, const SolverConfig& cfg) {
    cfg.validate();
    if (!sys.flow || !sys.in_jump_set || !sys.jump) throw InvalidConfig("hybrid system is missing flow or jump maps");

    HybridTrajectory traj;
    traj.diagnostic_names = sys.diagnostic_names;
    traj.dt = cfg.dt;

    HybridState x = x0;
    HybridTime time;
    traj.max_orthonormality_error = drift(x);
    traj.samples.push_back(make_sample(sys, time, x));

    auto jump_while_required = [&] {
        while (sys.in_jump_set(x)) {
            if (time.j >= cfg.j_max) {
                std::ostringstream os;
                os << "jump budget exhausted (j = " << time.j << " at t = " << time.t << "); Zeno behavior suspected";
                throw ZenoSuspected(os.str());
            }
            JumpEvent ev;
            ev.t = time.t;
            ev.j_before = time.j;
            ev.q_before = x.q;
            ev.merit_before = sys.jump_merit ? sys.jump_merit(x) : 0.0;
            // The pre-jump state is always recorded.
            const auto& last = traj.samples.back();
            if (last.time.t != time.t || last.time.j != time.j) traj.samples.push_back(make_sample(sys, time, x));
            x = sys.jump(x);
            ++time.j;
            ev.q_after = x.q;
            ev.merit_after = sys.jump_merit ? sys.jump_merit(x) : 0.0;
            traj.jumps.push_back(ev);
            traj.samples.push_back(make_sample(sys, time, x));
        }
    };

    jump_while_required();

    const auto steps = static_cast<long>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    for (long i = 1; i <= steps; ++i) {
        const double t_next = std::min(cfg.t_max, static_cast<double>(i) * cfg.dt);
        x = flow_step(sys, time.t, x, t_next - time.t);
        time.t = t_next;

        const double e = drift(x);
        traj.max_orthonormality_error = std::max(traj.max_orthonormality_error, e);
        if (e > kIntegrationTolerance) {
            std::ostringstream os;
            os << "rotation drifted from SO(3): |R^T R - I|_F = " << e << " at t = " << time.t;
            throw StateInvariantViolation(os.str());
        }

        if (i % cfg.record_stride == 0 || i == steps) traj.samples.push_back(make_sample(sys, time, x));
        jump_while_required();
    }
    return traj;
}

bool check_no_consecutive_jumps(const std::vector<JumpEvent>& jumps) {
    for (std::size_t i = 1; i < jumps.size(); ++i)
        if (!(jumps[i].t > jumps[i - 1].t)) return false;
    return true;
}

bool check_no_consecutive_jumps(const HybridTrajectory& traj) {
    return check_no_consecutive_jumps(traj.jumps);
}

}  // namespace synergy
