#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synergy/controllers.hpp"
#include "synergy/errors.hpp"

#include <numbers>

using namespace synergy;

TEST_CASE("gain validation") {
    ControllerGains g;
    CHECK_NOTHROW(g.validate(true));
    g.k_c = 0.0;
    CHECK_THROWS_AS(g.validate(false), InvalidConfig);
    g = ControllerGains{};
    g.k_s_min = 60.0;
    CHECK_NOTHROW(g.validate(false));
    CHECK_THROWS_AS(g.validate(true), InvalidConfig);
}

TEST_CASE("control laws") {
    const WarpedPotentialConfig cfg;
    ControllerGains g;
    g.k_c = 2.0;
    g.k_omega = 3.0;
    g.k_s = 7.0;
    const Rotation r = rot_angle_axis(1.2, Vector3(0, 0.6, 0.8));
    const ModeIndex q = init_mode(r, cfg);
    const Vector3 x = body_gradient(r, q, cfg);
    const Vector3 w(0.1, -0.2, 0.3), u1(1, 2, 3), xs(0.5, 0.5, 0.5);
    CHECK((kinematic_control(r, q, cfg, g) + 2.0 * x).norm() < 1e-15);
    CHECK((kinematic_dynamic_extension_field(u1, r, q, cfg, g) - (-3.0 * u1 - 2.0 * x)).norm() < 1e-14);
    CHECK((dynamic_control(r, q, w, cfg, g) - (-2.0 * x - 3.0 * w)).norm() < 1e-15);
    const SmoothControl s = smooth_dynamic_control(r, q, w, xs, cfg, g);
    CHECK((s.u2 - (-2.0 * xs - 3.0 * w)).norm() < 1e-15);
    CHECK((s.x_rs_dot - (-7.0 * (xs - x))).norm() < 1e-14);
}

TEST_CASE("initial states") {
    const WarpedPotentialConfig cfg;
    const Rotation r = rot_angle_axis(std::numbers::pi, Vector3(1, 1, 0).normalized());
    const HybridState k = initial_state(SystemKind::Kinematic, r, cfg);
    CHECK(!k.omega);
    CHECK(synergy_gap(r, k.q, cfg) <= kTieTolerance);
    const HybridState s = initial_state(SystemKind::DynamicSmooth, r, cfg, Vector3(1, 0, 0));
    CHECK((*s.x_rs - body_gradient(r, s.q, cfg)).norm() == 0.0);
    CHECK(*s.omega == Vector3(1, 0, 0));
    const HybridState e = initial_state(SystemKind::KinematicExtended, r, cfg, Vector3::Zero(), Vector3(0, 1, 0));
    CHECK(*e.u1 == Vector3(0, 1, 0));
    CHECK(to_string(SystemKind::DynamicSmooth) == "dynamic-smooth");
}

TEST_CASE("kinematic closed loop decreases U and jumps by at least delta") {
    const WarpedPotentialConfig cfg;
    const ControllerGains g;
    const HybridSystem sys = make_closed_loop(SystemKind::Kinematic, cfg, g);
    std::mt19937_64 rng(31);
    SolverConfig solver;
    solver.t_max = 5.0;
    for (int i = 0; i < 5; ++i) {
        const auto traj = simulate(sys, initial_state(SystemKind::Kinematic, random_rotation(rng), cfg), solver);
        const std::size_t iu = traj.diagnostic_index("U");
        for (std::size_t s = 1; s < traj.samples.size(); ++s) {
            const auto& a = traj.samples[s - 1];
            const auto& b = traj.samples[s];
            if (a.time.j == b.time.j) CHECK(b.diagnostics[iu] <= a.diagnostics[iu] + 1e-14);
        }
        for (const auto& e : traj.jumps) CHECK(e.merit_after <= e.merit_before - cfg.delta + 1e-10);
        CHECK(traj.diagnostic(traj.final_sample(), "dist") < traj.diagnostic(traj.samples.front(), "dist"));
    }
}

TEST_CASE("dynamic closed loop dissipates the mechanical energy") {
    const WarpedPotentialConfig cfg;
    ControllerGains g;
    g.k_c = 2.0;
    g.k_omega = 2.0;
    const HybridSystem sys = make_closed_loop(SystemKind::Dynamic, cfg, g);
    SolverConfig solver;
    solver.t_max = 10.0;
    const auto traj = simulate(
        sys, initial_state(SystemKind::Dynamic, rot_angle_axis(2.5, Vector3::UnitY()), cfg, Vector3(1, -2, 0.5)),
        solver);
    double prev = 1e300;
    int prev_j = -1;
    for (const auto& s : traj.samples) {
        const double e = g.k_c * traj.diagnostic(s, "U") / 2 + 0.5 * s.state.omega->squaredNorm();
        if (s.time.j == prev_j) CHECK(e <= prev + 1e-12);
        prev = e;
        prev_j = s.time.j;
    }
}

TEST_CASE("smooth input is continuous across jumps") {
    const WarpedPotentialConfig cfg;
    ControllerGains g;
    g.k_c = 2.0;
    g.k_omega = 2.0;
    g.k_s = 100.0;
    const HybridSystem sys = make_closed_loop(SystemKind::DynamicSmooth, cfg, g);
    HybridState x = initial_state(SystemKind::DynamicSmooth, rot_angle_axis(3.0, Vector3::UnitZ()), cfg,
                                  Vector3(1, -2, 0.5));
    x.q = ModeIndex(6);
    const Vector3 before = applied_input(SystemKind::DynamicSmooth, x, cfg, g);
    const Vector3 after = applied_input(SystemKind::DynamicSmooth, sys.jump(x), cfg, g);
    CHECK((before - after).norm() == 0.0);
}

TEST_CASE("closed-loop diagnostics") {
    const WarpedPotentialConfig cfg;
    const ControllerGains g;
    const HybridSystem sys = make_closed_loop(SystemKind::Dynamic, cfg, g);
    const HybridState x = initial_state(SystemKind::Dynamic, rot_angle_axis(1.0, Vector3::UnitX()), cfg,
                                        Vector3(0, 3, 4));
    const auto d = sys.diagnostics(0.0, x);
    REQUIRE(d.size() == sys.diagnostic_names.size());
    CHECK(d[0] == doctest::Approx(std::sin(0.5)));
    CHECK(d[3] == doctest::Approx(5.0));
}
