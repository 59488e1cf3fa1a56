#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synergy/errors.hpp"
#include "synergy/scenario.hpp"

#include <cmath>

using namespace synergy;

namespace {

ScenarioConfig parse(const std::string& text) { return ScenarioConfig::from_file(KeyValueFile::parse(text)); }

std::string config_error(const std::string& text) {
    try {
        parse(text).validate(true);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

const char* kFast = "analysis.bound_samples = 2000\nanalysis.dx_samples = 200\nsolver.t_max = 2\n";

}  // namespace

TEST_CASE("key-value parsing") {
    const auto f = KeyValueFile::parse("# comment\n a.b = 1 # trailing\n\nc = x y\n");
    CHECK(f.values().size() == 2);
    CHECK(f.values().at("a.b") == "1");
    CHECK(f.values().at("c") == "x y");
    CHECK_THROWS_AS(KeyValueFile::parse("novalue\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueFile::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(KeyValueFile::load("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("defaults") {
    const auto cfg = parse("");
    CHECK(cfg.kind == ScenarioKind::Kinematic);
    CHECK(cfg.potential.k == 0.5);
    CHECK(cfg.potential.delta == doctest::Approx(1.1 * delta_bar(0.5)));
    CHECK(cfg.gains.k_s == 50.0);
    CHECK_NOTHROW(cfg.validate(true));
    const auto k3 = parse("potential.k = 0.3\ngains.k_omega = 2\n");
    CHECK(k3.potential.delta == doctest::Approx(1.1 * delta_bar(0.3)));
    CHECK(k3.gains.k_s == 100.0);
}

TEST_CASE("validation names the offending field") {
    CHECK(config_error("potential.k = 0.8\n").find("k must lie in (0, 1/√2)") != std::string::npos);
    CHECK(config_error("potential.k = 0.8\n").rfind("potential.k:", 0) == 0);
    CHECK(config_error("gains.k_c = -1\n").rfind("gains", 0) == 0);
    CHECK(config_error("solver.dt = abc\n").rfind("solver.dt:", 0) == 0);
    CHECK(config_error("bogus.key = 1\n").rfind("bogus.key: unknown key", 0) == 0);
    CHECK(config_error("system.kind = rocket\n").rfind("system.kind:", 0) == 0);
    CHECK(config_error("system.kind = tracking\n").rfind("reference.kind:", 0) == 0);
    CHECK(config_error("reference.kind = constant\n").rfind("system.kind:", 0) == 0);
    CHECK(config_error("initial.omega = 1, 2\n").rfind("initial.omega:", 0) == 0);
    CHECK(config_error("potential.delta = 0.05\n").rfind("potential.delta:", 0) == 0);
    CHECK(config_error("system.kind = tracking\nreference.kind = constant\ntracking.inertia = 1 0 0 1 0 -1\n")
              .rfind("tracking.inertia:", 0) == 0);
    CHECK(config_error("system.kind = dynamic-smooth\ngains.k_s = 5\ngains.k_s_min = 10\n").rfind("gains", 0) == 0);
    CHECK(config_error("solver.j_max = 0\n").rfind("solver.j_max:", 0) == 0);
}

TEST_CASE("a sub-hypothesis delta loads for verification only") {
    const auto cfg = parse("potential.delta = 0.1\n");
    CHECK_NOTHROW(cfg.validate(false));
    CHECK_THROWS_AS(cfg.validate(true), ConfigError);
}

TEST_CASE("initial attitudes") {
    CHECK(parse("").initial_attitudes().size() == 1);
    const auto wc = parse("initial.mode = worst-case\ninitial.axis_count = 7\n").initial_attitudes();
    REQUIRE(wc.size() == 7);
    for (const auto& r : wc) CHECK(attitude_distance(r) == doctest::Approx(1.0));
    const auto a = parse("initial.mode = random\ninitial.axis_count = 3\nseed = 4\n").initial_attitudes();
    const auto b = parse("initial.mode = random\ninitial.axis_count = 3\nseed = 4\n").initial_attitudes();
    CHECK(a[2].matrix() == b[2].matrix());
}

TEST_CASE("sweep parameters") {
    const auto cfg = parse("");
    CHECK(with_parameter(cfg, "k", 0.3).potential.delta == doctest::Approx(1.1 * delta_bar(0.3)));
    CHECK(with_parameter(cfg, "k_omega", 2.0).gains.k_s == 100.0);
    CHECK(with_parameter(cfg, "initial-axis-count", 5.0).initial_attitudes().size() == 5);
    CHECK_THROWS_AS(with_parameter(cfg, "dt", 0.1), UnknownParameter);
    CHECK_THROWS_AS(run_sweep(cfg, "k_s", {}), UnknownParameter);
    CHECK(sweep_parameters().size() == 6);
}

TEST_CASE("scenario run is reproducible byte for byte") {
    const auto cfg = parse(std::string(kFast) + "system.kind = dynamic\ninitial.omega = 1, -2, 0.5\n");
    const auto a = run_scenario(cfg), b = run_scenario(cfg);
    CHECK(trajectory_csv(cfg, a) == trajectory_csv(cfg, b));
    CHECK(jump_log_csv(a) == jump_log_csv(b));
    CHECK(summary_csv(a.runs) == summary_csv(b.runs));
    const std::string csv = trajectory_csv(cfg, a);
    CHECK(csv.rfind("run,t,j,q,r_00,", 0) == 0);
    CHECK(csv.find(",omega_x,omega_y,omega_z,lyapunov_W\n") != std::string::npos);
    REQUIRE(a.runs.size() == 1);
    CHECK(a.runs[0].audits_passed());
    CHECK(a.lyapunov.c > 0.0);
}

TEST_CASE("tracking scenario") {
    const auto cfg = parse(std::string(kFast) +
                           "system.kind = tracking\nreference.kind = sinusoidal\n"
                           "reference.amplitude = 0.5, 0.3, 0\nreference.frequency = 1, 2, 0\n"
                           "reference.phase = 0, 1.5707963267948966, 0\nreference.offset = 0, 0, 0.2\n"
                           "gains.k_c = 2\ngains.k_omega = 2\n");
    const auto res = run_scenario(cfg);
    REQUIRE(res.runs.size() == 1);
    CHECK(res.runs[0].audits_passed());
    CHECK(trajectory_csv(cfg, res).find(",rd_22,lyapunov_W\n") != std::string::npos);
}

TEST_CASE("csv numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("verification negative control") {
    auto cfg = parse("analysis.bound_samples = 2000\nanalysis.gradient_samples = 50\nanalysis.probe_axes = 20\n");
    CHECK(run_verification(cfg).passed());
    cfg.potential.delta = 0.5 * delta_bar(0.5);
    const auto v = run_verification(cfg);
    REQUIRE(!v.passed());
    bool listed = false;
    for (const auto& f : v.failures()) listed = listed || f.rfind("gap-probe:", 0) == 0;
    CHECK(listed);
}
