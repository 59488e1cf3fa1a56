#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "synergy/errors.hpp"
#include "synergy/potential.hpp"

#include <cmath>
#include <numbers>

using namespace synergy;

namespace {

Vector3 axis_oracle(int q) {
    const Vector3 e = Vector3::Unit((q - 1) % 3);
    return q <= 3 ? e : Vector3(-e);
}

Matrix3 rodrigues(double th, const Vector3& u) {
    return Matrix3::Identity() + std::sin(th) * hat(u) + (1 - std::cos(th)) * hat(u) * hat(u);
}

double dist_sq(const Matrix3& m) { return (3.0 - m.trace()) / 4.0; }

double u_oracle(const Rotation& r, int q, double k) {
    const double d = dist_sq(r.matrix());
    const Matrix3 g = r.matrix() * rodrigues(2 * std::asin(k * d), axis_oracle(q));
    return 1.0 - std::sqrt(std::max(0.0, 1.0 - dist_sq(g)));
}

double delta_bar_oracle(double k) {
    return std::pow(-1 + std::sqrt(1 + 4 * k * k), 1.5) / (2 * std::sqrt(6.0) * k * k);
}

std::pair<Rotation, ModeIndex> random_flow_pair(std::mt19937_64& rng, const WarpedPotentialConfig& cfg) {
    std::uniform_int_distribution<int> pick(1, 6);
    while (true) {
        const Rotation r = random_rotation(rng);
        const ModeIndex q(pick(rng));
        if (in_flow_set(synergy_gap(r, q, cfg), cfg)) return {r, q};
    }
}

}  // namespace

TEST_CASE("mode index range") {
    CHECK_THROWS_AS(ModeIndex(0), std::out_of_range);
    CHECK_THROWS_AS(ModeIndex(7), std::out_of_range);
    CHECK(ModeIndex::all().size() == 6);
}

TEST_CASE("axis family is antipodal") {
    const WarpedPotentialConfig cfg;
    for (int q = 1; q <= 6; ++q) CHECK((cfg.axis(ModeIndex(q)) - axis_oracle(q)).norm() == 0.0);
}

TEST_CASE("delta_bar closed form") {
    for (double k : {0.05, 0.1, 0.2, 0.3, 0.5, 0.7})
        CHECK(delta_bar(k) == doctest::Approx(delta_bar_oracle(k)).epsilon(1e-14));
    CHECK(std::abs(delta_bar(0.5) - 0.21767) < 5e-6);
    CHECK(std::abs(delta_bar(0.2) - 0.10911) < 5e-6);
    CHECK_THROWS_AS(delta_bar(0.0), InvalidWarpGain);
    CHECK_THROWS_AS(delta_bar(0.8), InvalidWarpGain);
}

TEST_CASE("sandwich constants at k = 0.5") {
    CHECK(std::abs(alpha1(0.5) - 0.158494) < 5e-7);
    CHECK(alpha2(0.5) == 1.5625);
}

TEST_CASE("config validation") {
    WarpedPotentialConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.k = 0.8;
    CHECK_THROWS_AS(cfg.validate(), InvalidWarpGain);
    cfg = WarpedPotentialConfig::with_gain(0.3);
    CHECK(cfg.delta == doctest::Approx(1.1 * delta_bar(0.3)));
    cfg.delta = 0.5 * delta_bar(0.3);
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
    CHECK_NOTHROW(cfg.validate(false));
    cfg = WarpedPotentialConfig{};
    cfg.axes[1] = Vector3(1, 1, 0).normalized();
    CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("warp at rot(pi, e1) with k = 0.5") {
    const WarpedPotentialConfig cfg;
    const Rotation r = rot_angle_axis(std::numbers::pi, Vector3::UnitX());
    CHECK(warp_angle(r, 0.5) == doctest::Approx(std::numbers::pi / 3));
    const Rotation g = gamma(r, ModeIndex(1), cfg);
    CHECK(attitude_distance_sq(g) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(potential_U(r, ModeIndex(1), cfg) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("potential matches an independent evaluation") {
    std::mt19937_64 rng(21);
    for (double k : {0.1, 0.5, 0.7}) {
        const auto cfg = WarpedPotentialConfig::with_gain(k);
        for (int i = 0; i < 300; ++i) {
            const Rotation r = random_rotation(rng);
            for (int q = 1; q <= 6; ++q)
                CHECK(potential_U(r, ModeIndex(q), cfg) == doctest::Approx(u_oracle(r, q, k)).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("quaternion and matrix routes of the warp agree") {
    std::mt19937_64 rng(22);
    const WarpedPotentialConfig cfg;
    for (int i = 0; i < 300; ++i) {
        const Rotation r = random_rotation(rng);
        for (ModeIndex q : ModeIndex::all()) {
            const UnitQuaternion wq = warped_quaternion(UnitQuaternion::from_rotation(r), q, cfg);
            CHECK((wq.to_rotation().matrix() - gamma(r, q, cfg).matrix()).norm() < 1e-12);
        }
    }
}

TEST_CASE("potential is nonnegative and vanishes only at the identity") {
    const WarpedPotentialConfig cfg;
    for (ModeIndex q : ModeIndex::all()) CHECK(potential_U(Rotation::identity(), q, cfg) == 0.0);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 2000; ++i) {
        const Rotation r = random_rotation(rng);
        for (ModeIndex q : ModeIndex::all()) CHECK(potential_U(r, q, cfg) > 0.0);
    }
}

TEST_CASE("min potential and ties") {
    const WarpedPotentialConfig cfg;
    const auto at_identity = min_potential(Rotation::identity(), cfg);
    CHECK(at_identity.argmin.size() == 6);
    CHECK(at_identity.best() == ModeIndex(1));
    std::mt19937_64 rng(24);
    for (int i = 0; i < 500; ++i) {
        const Rotation r = random_rotation(rng);
        const auto m = min_potential(r, cfg);
        double lo = 1e300;
        for (ModeIndex q : ModeIndex::all()) lo = std::min(lo, potential_U(r, q, cfg));
        CHECK(m.value == lo);
        CHECK(synergy_gap(r, m.best(), cfg) == 0.0);
        for (ModeIndex q : ModeIndex::all()) CHECK(synergy_gap(r, q, cfg) >= 0.0);
    }
}

TEST_CASE("flow and jump sets share their boundary") {
    const WarpedPotentialConfig cfg;
    CHECK(in_flow_set(cfg.delta, cfg));
    CHECK(in_jump_set(cfg.delta, cfg));
    CHECK(!in_jump_set(0.0, cfg));
    CHECK(!in_flow_set(cfg.delta + 1e-9, cfg));
}

TEST_CASE("body gradient against finite differences") {
    std::mt19937_64 rng(25);
    for (double k : {0.1, 0.5}) {
        const auto cfg = WarpedPotentialConfig::with_gain(k);
        for (int i = 0; i < 200; ++i) {
            const auto [r, q] = random_flow_pair(rng, cfg);
            const double h = 1e-6;
            Vector3 fd;
            for (int a = 0; a < 3; ++a) {
                const Matrix3 step = rodrigues(h, Vector3::Unit(a));
                const Matrix3 back = rodrigues(-h, Vector3::Unit(a));
                fd(a) = (u_oracle(Rotation::from_matrix(r.matrix() * step), q.value(), k) -
                         u_oracle(Rotation::from_matrix(r.matrix() * back), q.value(), k)) /
                        (2 * h);
            }
            const Vector3 x = body_gradient(r, q, cfg);
            CHECK((fd - 2 * x).norm() <= 1e-5 * std::max(2 * x.norm(), 1e-8));
        }
    }
}

TEST_CASE("theta_q assembles the gradient") {
    std::mt19937_64 rng(26);
    const WarpedPotentialConfig cfg;
    for (int i = 0; i < 100; ++i) {
        const auto [r, q] = random_flow_pair(rng, cfg);
        const Rotation g = gamma(r, q, cfg);
        const Vector3 expected =
            theta_q(r, q, cfg).transpose() * psi(g) / (8.0 * std::sqrt(1.0 - attitude_distance_sq(g)));
        CHECK((body_gradient(r, q, cfg) - expected).norm() < 1e-14);
    }
}

TEST_CASE("gradient guard at a constructed singular point") {
    const WarpedPotentialConfig cfg;
    // η₁(θ) for R = rot(θ, e1) and mode 1; its root is where |Γ|_I = 1.
    const auto eta = [&](double th) {
        const double s = std::sin(th / 2);
        return std::cos(th / 2) * std::sqrt(1 - 0.25 * s * s * s * s) - 0.5 * s * s * s;
    };
    double lo = std::numbers::pi / 2, hi = std::numbers::pi;
    for (int i = 0; i < 200; ++i) (eta(0.5 * (lo + hi)) > 0 ? lo : hi) = 0.5 * (lo + hi);
    const Rotation r = rot_angle_axis(lo, Vector3::UnitX());
    CHECK(attitude_distance_sq(gamma(r, ModeIndex(1), cfg)) > 1 - 1e-12);
    CHECK_THROWS_AS(body_gradient(r, ModeIndex(1), cfg), SingularConfiguration);
    CHECK(synergy_gap(r, ModeIndex(1), cfg) > cfg.delta);
}

TEST_CASE("synergism bounds") {
    const WarpedPotentialConfig cfg;
    const auto b = synergism_bounds(cfg, 20000, 3);
    CHECK(b.alpha1 == alpha1(0.5));
    CHECK(b.alpha2 == alpha2(0.5));
    CHECK(b.alpha3 == doctest::Approx(b.lambda_theta_min * b.alpha1 / 4));
    CHECK(b.alpha4 == doctest::Approx(b.lambda_theta_max * b.alpha2 / 8));
    CHECK(b.lambda_theta_min > 0.0);
    CHECK(b.lambda_theta_min <= b.lambda_theta_max);
    CHECK(b.sample_count == 20000);
    CHECK(b.to_report().find("alpha3 = ") != std::string::npos);

    const auto sharded = synergism_bounds(cfg, 20000, 3, 4);
    CHECK(sharded.alpha3 == b.alpha3);
    CHECK(sharded.alpha4 == b.alpha4);
    CHECK(sharded.min_witness.matrix() == b.min_witness.matrix());
}
