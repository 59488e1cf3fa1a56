#include "synergy/controllers.hpp"

#include "synergy/errors.hpp"

#include <limits>

namespace synergy {

void ControllerGains::validate(bool smooth) const {
    if (!(k_c > 0.0)) throw InvalidConfig("gains.k_c must be positive");
    if (!(k_omega > 0.0)) throw InvalidConfig("gains.k_omega must be positive");
    if (smooth) {
        if (!(k_s > 0.0)) throw InvalidConfig("gains.k_s must be positive");
        if (!(k_s > k_s_min)) throw InvalidConfig("gains.k_s must exceed gains.k_s_min");
    }
}

Vector3 kinematic_control(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg,
                          const ControllerGains& gains) {
    return -gains.k_c * body_gradient(r, q, cfg);
}

Vector3 kinematic_dynamic_extension_field(const Vector3& u1, const Rotation& r, ModeIndex q,
                                          const WarpedPotentialConfig& cfg, const ControllerGains& gains) {
    return -gains.k_omega * u1 - gains.k_c * body_gradient(r, q, cfg);
}

Vector3 dynamic_control(const Rotation& r, ModeIndex q, const Vector3& omega, const WarpedPotentialConfig& cfg,
                        const ControllerGains& gains) {
    return -gains.k_c * body_gradient(r, q, cfg) - gains.k_omega * omega;
}

SmoothControl smooth_dynamic_control(const Rotation& r, ModeIndex q, const Vector3& omega, const Vector3& x_rs,
                                     const WarpedPotentialConfig& cfg, const ControllerGains& gains) {
    return {-gains.k_c * x_rs - gains.k_omega * omega, -gains.k_s * (x_rs - body_gradient(r, q, cfg))};
}

ModeIndex init_mode(const Rotation& r0, const WarpedPotentialConfig& cfg) {
    return min_potential(r0, cfg).best();
}

std::string_view to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::Kinematic: return "kinematic";
        case SystemKind::KinematicExtended: return "kinematic-extended";
        case SystemKind::Dynamic: return "dynamic";
        case SystemKind::DynamicSmooth: return "dynamic-smooth";
    }
    return "unknown";
}

Vector3 applied_input(SystemKind kind, const HybridState& x, const WarpedPotentialConfig& cfg,
                      const ControllerGains& gains) {
    switch (kind) {
        case SystemKind::Kinematic: return kinematic_control(x.r, x.q, cfg, gains);
        case SystemKind::KinematicExtended: return x.u1.value();
        case SystemKind::Dynamic: return dynamic_control(x.r, x.q, x.omega.value(), cfg, gains);
        case SystemKind::DynamicSmooth: return -gains.k_c * x.x_rs.value() - gains.k_omega * x.omega.value();
    }
    return Vector3::Zero();
}

HybridSystem make_closed_loop(SystemKind kind, const WarpedPotentialConfig& cfg, const ControllerGains& gains) {
    cfg.validate();
    gains.validate(kind == SystemKind::DynamicSmooth);

    HybridSystem sys;
    sys.flow = [kind, cfg, gains](double, const HybridState& x) {
        StateRate f;
        switch (kind) {
            case SystemKind::Kinematic:
                f.r_rate = kinematic_control(x.r, x.q, cfg, gains);
                break;
            case SystemKind::KinematicExtended:
                f.r_rate = x.u1.value();
                f.u1 = kinematic_dynamic_extension_field(*x.u1, x.r, x.q, cfg, gains);
                break;
            case SystemKind::Dynamic:
                f.r_rate = x.omega.value();
                f.omega = dynamic_control(x.r, x.q, *x.omega, cfg, gains);
                break;
            case SystemKind::DynamicSmooth: {
                const SmoothControl c = smooth_dynamic_control(x.r, x.q, x.omega.value(), x.x_rs.value(), cfg, gains);
                f.r_rate = *x.omega;
                f.omega = c.u2;
                f.x_rs = c.x_rs_dot;
                break;
            }
        }
        return f;
    };
    sys.in_jump_set = [cfg](const HybridState& x) { return in_jump_set(synergy_gap(x.r, x.q, cfg), cfg); };
    sys.jump = [cfg](const HybridState& x) {
        HybridState next = x;
        next.q = min_potential(x.r, cfg).best();
        return next;
    };
    sys.jump_merit = [cfg](const HybridState& x) { return potential_U(x.r, x.q, cfg); };
    sys.diagnostic_names = {"dist", "U", "gap", "omega_norm", "u_x", "u_y", "u_z", "xr_x", "xr_y", "xr_z"};
    sys.diagnostics = [kind, cfg, gains](double, const HybridState& x) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        Vector3 u = Vector3::Constant(nan), xr = Vector3::Constant(nan);
        try {
            xr = body_gradient(x.r, x.q, cfg);
            u = applied_input(kind, x, cfg, gains);
        } catch (const SingularConfiguration&) {
        }
        double rate_norm = 0.0;
        if (x.omega) rate_norm = x.omega->norm();
        else if (x.u1) rate_norm = x.u1->norm();
        else rate_norm = u.norm();
        return std::vector<double>{attitude_distance(x.r), potential_U(x.r, x.q, cfg), synergy_gap(x.r, x.q, cfg),
                                   rate_norm, u.x(), u.y(), u.z(), xr.x(), xr.y(), xr.z()};
    };
    return sys;
}

HybridState initial_state(SystemKind kind, const Rotation& r0, const WarpedPotentialConfig& cfg,
                          const Vector3& omega0, const Vector3& u1) {
    HybridState x;
    x.r = r0;
    x.q = init_mode(r0, cfg);
    switch (kind) {
        case SystemKind::Kinematic: break;
        case SystemKind::KinematicExtended: x.u1 = u1; break;
        case SystemKind::Dynamic: x.omega = omega0; break;
        case SystemKind::DynamicSmooth:
            x.omega = omega0;
            x.x_rs = body_gradient(r0, x.q, cfg);
            break;
    }
    return x;
}

}  // namespace synergy
