#include "synergy/tracking.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace synergy {

InertiaMatrix::InertiaMatrix(const Matrix3& j) : j_(j) {
    if (!j.allFinite()) throw SingularInertia("inertia matrix has non-finite entries");
    if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw SingularInertia("inertia matrix must be symmetric");
    const Eigen::SelfAdjointEigenSolver<Matrix3> es(j, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(2);
    if (!(lo > 0.0)) throw SingularInertia("inertia matrix must be positive definite");
    if (hi / lo > 1e10) throw SingularInertia("inertia matrix is ill-conditioned (condition number > 1e10)");
    j_inv_ = j.inverse();
}

InertiaMatrix InertiaMatrix::diagonal(double jx, double jy, double jz) {
    return InertiaMatrix(Vector3(jx, jy, jz).asDiagonal().toDenseMatrix());
}

InertiaMatrix InertiaMatrix::from_upper(const std::array<double, 6>& u) {
    Matrix3 j;
    j << u[0], u[1], u[2],
         u[1], u[3], u[4],
         u[2], u[4], u[5];
    return InertiaMatrix(j);
}

RigidBodyRate body_dynamics(const RigidBodyState& s, const Vector3& tau, const InertiaMatrix& j) {
    const Vector3 h = j.matrix() * s.omega;
    return {s.omega, j.inverse() * (h.cross(s.omega) + tau)};
}

ReferenceTrajectory::ReferenceTrajectory(Rotation r0, Signal omega, Signal omega_dot, double fd_step, double horizon)
    : r0_(std::move(r0)), omega_(std::move(omega)), omega_dot_(std::move(omega_dot)), fd_step_(fd_step) {
    if (!omega_) throw InvalidConfig("reference: angular velocity signal is required");
    if (!(fd_step_ > 0.0)) throw InvalidConfig("reference: finite-difference step must be positive");
    if (omega_dot_ && horizon > 0.0) {
        const double err = consistency_error(horizon);
        if (err > 1e-6) {
            std::ostringstream os;
            os << "reference: omega_dot disagrees with the derivative of omega (max error " << err << ")";
            throw InvalidConfig(os.str());
        }
    }
}

Vector3 ReferenceTrajectory::omega_dot(double t) const {
    if (omega_dot_) return omega_dot_(t);
    return (omega_(t + fd_step_) - omega_(t - fd_step_)) / (2.0 * fd_step_);
}

double ReferenceTrajectory::consistency_error(double horizon, int samples) const {
    double worst = 0.0;
    const double h = 1e-4;
    for (int i = 0; i <= samples; ++i) {
        const double t = horizon * i / samples;
        const bool near_break = std::any_of(breakpoints_.begin(), breakpoints_.end(),
                                            [&](double b) { return std::abs(t - b) <= 2.0 * h; });
        if (near_break) continue;
        const Vector3 fd = (omega_(t + h) - omega_(t - h)) / (2.0 * h);
        worst = std::max(worst, (fd - omega_dot(t)).cwiseAbs().maxCoeff());
    }
    return worst;
}

ReferenceTrajectory ReferenceTrajectory::constant(const Rotation& r0) {
    const auto zero = [](double) { return Vector3::Zero().eval(); };
    return ReferenceTrajectory(r0, zero, zero);
}

ReferenceTrajectory ReferenceTrajectory::sinusoidal(const Rotation& r0, const Vector3& amp, const Vector3& freq,
                                                    const Vector3& phase, const Vector3& offset) {
    auto w = [=](double t) {
        Vector3 v;
        for (int i = 0; i < 3; ++i) v(i) = amp(i) * std::sin(freq(i) * t + phase(i)) + offset(i);
        return v;
    };
    auto wd = [=](double t) {
        Vector3 v;
        for (int i = 0; i < 3; ++i) v(i) = amp(i) * freq(i) * std::cos(freq(i) * t + phase(i));
        return v;
    };
    return ReferenceTrajectory(r0, w, wd);
}

ReferenceTrajectory ReferenceTrajectory::piecewise_constant(const Rotation& r0, std::vector<double> times,
                                                            std::vector<Vector3> values) {
    if (times.empty() || times.size() != values.size())
        throw InvalidConfig("reference: piecewise signal needs matching, non-empty times and values");
    if (!std::is_sorted(times.begin(), times.end())) throw InvalidConfig("reference: breakpoints must be sorted");
    auto w = [times, values](double t) {
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        if (it == times.begin()) return values.front();
        return values[static_cast<std::size_t>(it - times.begin()) - 1];
    };
    auto wd = [](double) { return Vector3::Zero().eval(); };
    ReferenceTrajectory ref(r0, w, wd, 1e-4, 0.0);
    ref.breakpoints_ = times;
    return ref;
}

TrackingErrors tracking_errors(const RigidBodyState& s, const Rotation& r_d, const Vector3& omega_d) {
    return {s.r * r_d.transpose(), r_d * (s.omega - omega_d)};
}

Vector3 tracking_torque(const RigidBodyState& s, const Rotation& r_d, const Vector3& omega_d,
                        const Vector3& omega_d_dot, const Vector3& u_c, const InertiaMatrix& j) {
    const Vector3 h = j.matrix() * s.omega;
    return -h.cross(s.omega) +
           j.matrix() * (omega_d_dot - omega_d.cross(s.omega) + r_d.matrix().transpose() * u_c);
}

namespace {

struct LoopTerms {
    TrackingErrors err;
    Vector3 xr;
    Vector3 u_c;
    Vector3 tau;
};

LoopTerms loop_terms(double t, const HybridState& x, const ReferenceTrajectory& ref, const InertiaMatrix& j,
                     const WarpedPotentialConfig& cfg, const ControllerGains& gains, TrackingVariant variant) {
    const RigidBodyState body{x.r, x.omega.value()};
    const Rotation& r_d = x.r_ref.value();
    const Vector3 wd = ref.omega(t);
    LoopTerms out;
    out.err = tracking_errors(body, r_d, wd);
    out.xr = body_gradient(out.err.r_tilde, x.q, cfg);
    const Vector3 feedback = variant == TrackingVariant::Smooth ? x.x_rs.value() : out.xr;
    out.u_c = -gains.k_c * feedback - gains.k_omega * out.err.omega_tilde;
    out.tau = tracking_torque(body, r_d, wd, ref.omega_dot(t), out.u_c, j);
    return out;
}

Rotation error_attitude(const HybridState& x) { return x.r * x.r_ref.value().transpose(); }

}  // namespace

HybridSystem make_tracking_system(const ReferenceTrajectory& ref, const InertiaMatrix& j,
                                  const WarpedPotentialConfig& cfg, const ControllerGains& gains,
                                  TrackingVariant variant) {
    cfg.validate();
    gains.validate(variant == TrackingVariant::Smooth);

    HybridSystem sys;
    sys.flow = [=](double t, const HybridState& x) {
        const LoopTerms lt = loop_terms(t, x, ref, j, cfg, gains, variant);
        const RigidBodyRate rate = body_dynamics({x.r, *x.omega}, lt.tau, j);
        StateRate f;
        f.r_rate = rate.r_rate;
        f.omega = rate.omega_dot;
        f.r_ref_rate = ref.omega(t);
        if (variant == TrackingVariant::Smooth) f.x_rs = -gains.k_s * (*x.x_rs - lt.xr);
        return f;
    };
    sys.in_jump_set = [cfg](const HybridState& x) {
        return in_jump_set(synergy_gap(error_attitude(x), x.q, cfg), cfg);
    };
    sys.jump = [cfg](const HybridState& x) {
        HybridState next = x;
        next.q = min_potential(error_attitude(x), cfg).best();
        return next;
    };
    sys.jump_merit = [cfg](const HybridState& x) { return potential_U(error_attitude(x), x.q, cfg); };

    sys.diagnostic_names = {"dist", "U", "gap", "omega_norm", "u_x", "u_y", "u_z", "xr_x", "xr_y", "xr_z",
                            "tau_x", "tau_y", "tau_z", "wt_x", "wt_y", "wt_z", "wd_x", "wd_y", "wd_z"};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) sys.diagnostic_names.push_back("rt_" + std::to_string(r) + std::to_string(c));

    sys.diagnostics = [=](double t, const HybridState& x) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const Rotation rt = error_attitude(x);
        const Vector3 wd = ref.omega(t);
        const TrackingErrors err = tracking_errors({x.r, *x.omega}, *x.r_ref, wd);
        Vector3 u = Vector3::Constant(nan), xr = Vector3::Constant(nan), tau = Vector3::Constant(nan);
        try {
            const LoopTerms lt = loop_terms(t, x, ref, j, cfg, gains, variant);
            u = lt.u_c, xr = lt.xr, tau = lt.tau;
        } catch (const SingularConfiguration&) {
        }
        std::vector<double> d{attitude_distance(rt), potential_U(rt, x.q, cfg), synergy_gap(rt, x.q, cfg),
                              err.omega_tilde.norm()};
        for (const Vector3* v : std::initializer_list<const Vector3*>{&u, &xr, &tau, &err.omega_tilde, &wd}) d.insert(d.end(), v->data(), v->data() + 3);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) d.push_back(rt(r, c));
        return d;
    };
    return sys;
}

HybridState tracking_initial_state(const RigidBodyState& x0, const ReferenceTrajectory& ref,
                                   const WarpedPotentialConfig& cfg, const ControllerGains&,
                                   TrackingVariant variant) {
    HybridState x;
    x.r = x0.r;
    x.omega = x0.omega;
    x.r_ref = ref.initial_attitude();
    const Rotation rt = error_attitude(x);
    x.q = init_mode(rt, cfg);
    if (variant == TrackingVariant::Smooth) x.x_rs = body_gradient(rt, x.q, cfg);
    return x;
}

HybridTrajectory simulate_tracking(const RigidBodyState& x0, const ReferenceTrajectory& ref, const InertiaMatrix& j,
                                   const WarpedPotentialConfig& cfg, const ControllerGains& gains,
                                   TrackingVariant variant, const SolverConfig& solver) {
    const HybridSystem sys = make_tracking_system(ref, j, cfg, gains, variant);
    return simulate(sys, tracking_initial_state(x0, ref, cfg, gains, variant), solver);
}

TrackingErrors sample_errors(const TrajectorySample& s, const ReferenceTrajectory& ref) {
    return tracking_errors({s.state.r, s.state.omega.value()}, s.state.r_ref.value(), ref.omega(s.time.t));
}

}  // namespace synergy
