#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synergy/errors.hpp"
#include "synergy/hybrid.hpp"

#include <cmath>

using namespace synergy;

namespace {

// Constant body rate, rate state decaying as ω̇ = −ω, never jumping.
HybridSystem damped_spin() {
    HybridSystem sys;
    sys.flow = [](double, const HybridState& x) {
        StateRate f;
        f.r_rate = *x.omega;
        f.omega = -*x.omega;
        return f;
    };
    sys.in_jump_set = [](const HybridState&) { return false; };
    sys.jump = [](const HybridState& x) { return x; };
    sys.diagnostic_names = {"wx"};
    sys.diagnostics = [](double, const HybridState& x) { return std::vector<double>{x.omega->x()}; };
    return sys;
}

// Mode toggles 1 -> 2 when t has passed `at`; the jump set is written on a
// clock kept in u1.x.
HybridSystem clocked_switch(double at) {
    HybridSystem sys;
    sys.flow = [](double, const HybridState&) {
        StateRate f;
        f.r_rate = Vector3(0, 0, 1);
        f.u1 = Vector3(1, 0, 0);
        return f;
    };
    sys.in_jump_set = [at](const HybridState& x) { return x.q == ModeIndex(1) && x.u1->x() >= at; };
    sys.jump = [](const HybridState& x) {
        HybridState n = x;
        n.q = ModeIndex(2);
        return n;
    };
    sys.jump_merit = [](const HybridState& x) { return static_cast<double>(x.q.value()); };
    return sys;
}

}  // namespace

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    cfg = SolverConfig{};
    cfg.record_stride = 0;
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("flow integrates rotation and vector states to fourth order") {
    HybridState x0;
    x0.omega = Vector3(0.4, -0.2, 0.9);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_max = 2.0;
    const auto traj = simulate(damped_spin(), x0, cfg);
    const auto& last = traj.final_sample();
    CHECK(last.time.t == doctest::Approx(2.0));
    CHECK(last.time.j == 0);
    CHECK((*last.state.omega - *x0.omega * std::exp(-2.0)).norm() < 1e-9);
    // The body rate keeps a fixed direction, so R(t) = exp((1 − e^{−t}) ω0).
    const Rotation exact = exp_map((1.0 - std::exp(-2.0)) * *x0.omega);
    CHECK((last.state.r.matrix() - exact.matrix()).norm() < 1e-9);
}

TEST_CASE("halving the step reduces the error sixteenfold") {
    HybridState x0;
    x0.omega = Vector3(1.0, 0.5, -0.3);
    const Rotation exact = exp_map((1.0 - std::exp(-1.0)) * *x0.omega);
    double err[2];
    for (int i = 0; i < 2; ++i) {
        SolverConfig cfg;
        cfg.dt = i == 0 ? 0.1 : 0.05;
        cfg.t_max = 1.0;
        err[i] = (simulate(damped_spin(), x0, cfg).final_sample().state.r.matrix() - exact.matrix()).norm();
    }
    CHECK(err[0] / err[1] > 12.0);
    CHECK(err[0] / err[1] < 20.0);
}

TEST_CASE("recording stride keeps the final sample") {
    HybridState x0;
    x0.omega = Vector3(0.1, 0, 0);
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_max = 1.005;
    cfg.record_stride = 7;
    const auto traj = simulate(damped_spin(), x0, cfg);
    CHECK(traj.samples.front().time.t == 0.0);
    CHECK(traj.final_sample().time.t == doctest::Approx(1.005));
    CHECK(traj.diagnostic(traj.final_sample(), "wx") == doctest::Approx(0.1 * std::exp(-1.005)).epsilon(1e-9));
    CHECK_THROWS_AS(traj.diagnostic_index("nope"), std::out_of_range);
}

TEST_CASE("jumps keep t, increment j and are bracketed by samples") {
    HybridState x0;
    x0.u1 = Vector3::Zero();
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_max = 1.0;
    cfg.record_stride = 1000;
    const auto traj = simulate(clocked_switch(0.5), x0, cfg);
    REQUIRE(traj.jumps.size() == 1);
    const auto& e = traj.jumps.front();
    CHECK(e.q_before == ModeIndex(1));
    CHECK(e.q_after == ModeIndex(2));
    CHECK(e.merit_before == 1.0);
    CHECK(e.merit_after == 2.0);
    CHECK(e.t == doctest::Approx(0.5).epsilon(1e-9));
    int pre = -1;
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i)
        if (traj.samples[i + 1].time.j == 1 && traj.samples[i].time.j == 0) pre = static_cast<int>(i);
    REQUIRE(pre >= 0);
    CHECK(traj.samples[pre].time.t == traj.samples[pre + 1].time.t);
    CHECK(traj.samples[pre].state.q == ModeIndex(1));
    CHECK(traj.samples[pre + 1].state.q == ModeIndex(2));
    CHECK(traj.final_sample().time.j == 1);
    CHECK(check_no_consecutive_jumps(traj));
}

TEST_CASE("a jump at t = 0 happens before any flow") {
    HybridState x0;
    x0.u1 = Vector3(1, 0, 0);
    SolverConfig cfg;
    cfg.dt = 0.1;
    cfg.t_max = 0.2;
    const auto traj = simulate(clocked_switch(0.5), x0, cfg);
    REQUIRE(traj.jumps.size() == 1);
    CHECK(traj.jumps.front().t == 0.0);
    CHECK(traj.samples[1].time.j == 1);
    CHECK(traj.samples[1].time.t == 0.0);
}

TEST_CASE("perpetual jump set is reported as Zeno") {
    HybridSystem sys = damped_spin();
    sys.in_jump_set = [](const HybridState&) { return true; };
    HybridState x0;
    x0.omega = Vector3::Zero();
    SolverConfig cfg;
    cfg.j_max = 5;
    CHECK_THROWS_AS(simulate(sys, x0, cfg), ZenoSuspected);
}

TEST_CASE("state and flow must carry the same components") {
    HybridState x0;  // no omega
    SolverConfig cfg;
    CHECK_THROWS_AS(simulate(damped_spin(), x0, cfg), StateInvariantViolation);
}

TEST_CASE("consecutive jump detection") {
    std::vector<JumpEvent> jumps(2);
    jumps[0].t = 1.0;
    jumps[1].t = 2.0;
    CHECK(check_no_consecutive_jumps(jumps));
    jumps[1].t = 1.0;
    CHECK(!check_no_consecutive_jumps(jumps));
}

TEST_CASE("hybrid time ordering") {
    CHECK(HybridTime{1.0, 0} < HybridTime{1.0, 1});
    CHECK(HybridTime{0.5, 3} < HybridTime{1.0, 0});
}
