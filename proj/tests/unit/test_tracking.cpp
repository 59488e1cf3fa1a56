#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synergy/errors.hpp"
#include "synergy/tracking.hpp"

#include <cmath>
#include <numbers>

using namespace synergy;

namespace {

HybridSystem free_body(const InertiaMatrix& j) {
    HybridSystem sys;
    sys.flow = [j](double, const HybridState& x) {
        const RigidBodyRate rate = body_dynamics({x.r, *x.omega}, Vector3::Zero(), j);
        StateRate f;
        f.r_rate = rate.r_rate;
        f.omega = rate.omega_dot;
        return f;
    };
    sys.in_jump_set = [](const HybridState&) { return false; };
    sys.jump = [](const HybridState& x) { return x; };
    return sys;
}

ReferenceTrajectory test_reference() {
    return ReferenceTrajectory::sinusoidal(rot_angle_axis(0.3, Vector3::UnitZ()), Vector3(0.5, 0.3, 0.0),
                                           Vector3(1.0, 2.0, 0.0), Vector3(0.0, std::numbers::pi / 2, 0.0),
                                           Vector3(0.0, 0.0, 0.2));
}

}  // namespace

TEST_CASE("inertia validation") {
    CHECK_NOTHROW(InertiaMatrix::diagonal(0.02, 0.03, 0.04));
    CHECK_THROWS_AS(InertiaMatrix::diagonal(0.02, -0.03, 0.04), SingularInertia);
    CHECK_THROWS_AS(InertiaMatrix::diagonal(1.0, 1.0, 1e-11), SingularInertia);
    Matrix3 m = Matrix3::Identity();
    m(0, 1) = 0.1;
    CHECK_THROWS_AS(InertiaMatrix{m}, SingularInertia);
    const auto j = InertiaMatrix::from_upper({2, 0.1, 0, 3, 0.2, 4});
    CHECK(j.matrix()(1, 0) == 0.1);
    CHECK((j.matrix() * j.inverse() - Matrix3::Identity()).norm() < 1e-14);
}

TEST_CASE("torque-free motion conserves energy and angular momentum") {
    const auto j = InertiaMatrix::diagonal(0.02, 0.03, 0.04);
    HybridState x0;
    x0.omega = Vector3(1.0, -2.0, 0.5);
    SolverConfig cfg;
    cfg.t_max = 10.0;
    const auto traj = simulate(free_body(j), x0, cfg);
    const auto energy = [&](const HybridState& x) { return 0.5 * x.omega->dot(j.matrix() * *x.omega); };
    const auto momentum = [&](const HybridState& x) { return Vector3(x.r * (j.matrix() * *x.omega)); };
    const double e0 = energy(x0);
    const Vector3 h0 = momentum(x0);
    for (const auto& s : traj.samples) {
        CHECK(std::abs(energy(s.state) - e0) < 1e-8);
        CHECK((momentum(s.state) - h0).norm() < 1e-8);
    }
}

TEST_CASE("reference consistency") {
    const auto ref = test_reference();
    CHECK(ref.consistency_error(10.0) < 1e-6);
    CHECK((ref.omega(0.0) - Vector3(0.0, 0.3, 0.2)).norm() < 1e-15);
    auto w = [](double t) { return Vector3(std::sin(t), 0, 0); };
    auto wrong = [](double) { return Vector3(1, 0, 0); };
    CHECK_THROWS_AS(ReferenceTrajectory(Rotation::identity(), w, wrong), InvalidConfig);
    const ReferenceTrajectory fd(Rotation::identity(), w, {});
    CHECK(std::abs(fd.omega_dot(0.7).x() - std::cos(0.7)) < 1e-8);
    const auto pw = ReferenceTrajectory::piecewise_constant(Rotation::identity(), {0.0, 1.0},
                                                            {Vector3(1, 0, 0), Vector3(0, 1, 0)});
    CHECK(pw.omega(0.5) == Vector3(1, 0, 0));
    CHECK(pw.omega(1.5) == Vector3(0, 1, 0));
    CHECK(pw.consistency_error(2.0) == 0.0);
}

TEST_CASE("tracking errors vanish on the reference") {
    const Rotation rd = rot_angle_axis(0.8, Vector3(0, 0.6, 0.8));
    const Vector3 wd(0.1, 0.2, 0.3);
    const TrackingErrors e = tracking_errors({rd, wd}, rd, wd);
    CHECK((e.r_tilde.matrix() - Matrix3::Identity()).norm() < 1e-15);
    CHECK(e.omega_tilde.norm() == 0.0);
}

TEST_CASE("the tracking torque produces the commanded error acceleration") {
    // d/dt ω̃ = u_c when τ is applied, checked by finite differences of the
    // error definition along the plant and reference motion.
    const auto j = InertiaMatrix::from_upper({0.02, 0.001, 0.0, 0.03, 0.002, 0.04});
    const auto ref = test_reference();
    const double t = 0.4, h = 1e-5;
    const Rotation rd = rot_angle_axis(0.7, Vector3(1, 0, 0));
    const RigidBodyState s{rot_angle_axis(2.0, Vector3(0, 1, 0)), Vector3(0.3, -0.1, 0.6)};
    const Vector3 u_c(0.2, -0.4, 0.1);
    const Vector3 tau = tracking_torque(s, rd, ref.omega(t), ref.omega_dot(t), u_c, j);
    const auto advance = [&](double dt) {
        const RigidBodyRate rate = body_dynamics(s, tau, j);
        const RigidBodyState n{integrate_rotation_step(s.r, s.omega, dt), s.omega + dt * rate.omega_dot};
        const Rotation rdn = integrate_rotation_step(rd, ref.omega(t), dt);
        return tracking_errors(n, rdn, ref.omega(t + dt)).omega_tilde;
    };
    const Vector3 fd = (advance(h) - tracking_errors(s, rd, ref.omega(t)).omega_tilde) / h;
    CHECK((fd - u_c).norm() < 1e-4);
}

TEST_CASE("tracking initial state and diagnostics") {
    const WarpedPotentialConfig cfg;
    const ControllerGains g;
    const auto ref = test_reference();
    const auto j = InertiaMatrix::diagonal(0.02, 0.03, 0.04);
    const RigidBodyState x0{rot_angle_axis(std::numbers::pi, Vector3::UnitY()) * ref.initial_attitude(),
                            ref.omega(0.0)};
    const HybridState x = tracking_initial_state(x0, ref, cfg, g, TrackingVariant::Smooth);
    REQUIRE(x.x_rs);
    const Rotation rt = x.r * x.r_ref->transpose();
    CHECK(attitude_distance(rt) == doctest::Approx(1.0));
    CHECK(synergy_gap(rt, x.q, cfg) <= kTieTolerance);
    const HybridSystem sys = make_tracking_system(ref, j, cfg, g, TrackingVariant::Hybrid);
    const auto d = sys.diagnostics(0.0, x);
    CHECK(d.size() == sys.diagnostic_names.size());
    CHECK(d[3] == doctest::Approx(0.0));
}
