#include "synergy/potential.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace synergy {

ModeIndex::ModeIndex(int q) : q_(q) {
    if (q < 1 || q > kCount) throw std::out_of_range("mode index must lie in {1,...,6}, got " + std::to_string(q));
}

std::array<ModeIndex, ModeIndex::kCount> ModeIndex::all() {
    return {ModeIndex(1), ModeIndex(2), ModeIndex(3), ModeIndex(4), ModeIndex(5), ModeIndex(6)};
}

namespace {

void check_gain(double k) {
    if (!(k > 0.0 && k < kMaxWarpGain)) {
        std::ostringstream os;
        os << "k must lie in (0, 1/√2), got " << k;
        throw InvalidWarpGain(os.str());
    }
}

}  // namespace

double delta_bar(double k) {
    check_gain(k);
    const double s = -1.0 + std::sqrt(1.0 + 4.0 * k * k);
    return std::pow(s, 1.5) / (2.0 * std::sqrt(6.0) * k * k);
}

WarpedPotentialConfig WarpedPotentialConfig::with_gain(double k) {
    WarpedPotentialConfig cfg;
    cfg.k = k;
    cfg.delta = 1.1 * delta_bar(k);
    return cfg;
}

void WarpedPotentialConfig::validate(bool require_gap_hypothesis) const {
    check_gain(k);
    for (int i = 0; i < 3; ++i) {
        if (std::abs(axes[i].norm() - 1.0) > kConstructionTolerance)
            throw InvalidConfig("potential axes must be unit vectors");
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(axes[i].dot(axes[j])) > kConstructionTolerance)
                throw InvalidConfig("potential axes must be pairwise orthogonal");
    }
    if (!(delta > 0.0)) throw InvalidConfig("delta must be positive");
    if (require_gap_hypothesis && !(delta > delta_bar(k))) {
        std::ostringstream os;
        os << "delta must exceed delta_bar(k) = " << delta_bar(k) << ", got " << delta;
        throw InvalidConfig(os.str());
    }
    if (!(singularity_guard > 0.0 && singularity_guard < 1.0))
        throw InvalidConfig("singularity_guard must lie in (0, 1)");
}

Vector3 WarpedPotentialConfig::axis(ModeIndex q) const {
    const int i = q.value() - 1;
    return i < 3 ? axes[i] : Vector3(-axes[i - 3]);
}

double potential_V(const Rotation& r) {
    return 1.0 - std::sqrt(1.0 - attitude_distance_sq(r));
}

double warp_angle(const Rotation& r, double k) {
    return 2.0 * std::asin(k * attitude_distance_sq(r));
}

Rotation gamma(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg) {
    return r * rot_angle_axis(warp_angle(r, cfg.k), cfg.axis(q));
}

UnitQuaternion warped_quaternion(const UnitQuaternion& r, ModeIndex q, const WarpedPotentialConfig& cfg) {
    const double e2 = r.eps().squaredNorm();
    const double kw = cfg.k * e2;
    const double c = std::sqrt(1.0 - kw * kw);
    const Vector3 u = cfg.axis(q);
    const double eta = r.eta() * c - kw * r.eps().dot(u);
    const Vector3 eps = kw * r.eta() * u + c * r.eps() + kw * r.eps().cross(u);
    return UnitQuaternion(eta, eps);
}

double potential_U(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg) {
    return potential_V(gamma(r, q, cfg));
}

Matrix3 theta_q(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg) {
    const double d2 = attitude_distance_sq(r);
    const Vector3 u = cfg.axis(q);
    const Rotation warp = rot_angle_axis(2.0 * std::asin(cfg.k * d2), u);
    return warp.matrix().transpose() +
           cfg.k * u * psi(r).transpose() / std::sqrt(1.0 - cfg.k * cfg.k * d2 * d2);
}

Vector3 body_gradient(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg) {
    const Rotation g = gamma(r, q, cfg);
    const double margin = 1.0 - attitude_distance_sq(g);
    if (margin < cfg.singularity_guard) {
        std::ostringstream os;
        os << "gradient evaluated at a singular configuration (1 - |Gamma|_I^2 = " << margin << ", mode "
           << q.value() << ")";
        throw SingularConfiguration(os.str());
    }
    return theta_q(r, q, cfg).transpose() * psi(g) / (8.0 * std::sqrt(margin));
}

MinPotential min_potential(const Rotation& r, const WarpedPotentialConfig& cfg) {
    std::array<double, ModeIndex::kCount> values{};
    for (ModeIndex m : ModeIndex::all()) values[m.value() - 1] = potential_U(r, m, cfg);
    MinPotential out;
    out.value = *std::min_element(values.begin(), values.end());
    for (ModeIndex m : ModeIndex::all())
        if (values[m.value() - 1] - out.value <= kTieTolerance) out.argmin.push_back(m);
    return out;
}

double synergy_gap(const Rotation& r, ModeIndex q, const WarpedPotentialConfig& cfg) {
    return potential_U(r, q, cfg) - min_potential(r, cfg).value;
}

double alpha1(double k) {
    check_gain(k);
    return (1.0 - k * k - k * std::sqrt(1.0 - k * k)) / 2.0;
}

double alpha2(double k) {
    check_gain(k);
    return 1.0 + k + k * k / 4.0;
}

std::string SynergismBounds::to_report() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "alpha1 = " << alpha1 << '\n'
       << "alpha2 = " << alpha2 << '\n'
       << "alpha3 = " << alpha3 << '\n'
       << "alpha4 = " << alpha4 << '\n'
       << "lambda_theta_min = " << lambda_theta_min << '\n'
       << "lambda_theta_max = " << lambda_theta_max << '\n'
       << "delta_bar = " << delta_bar << '\n'
       << "sample_count = " << sample_count << '\n';
    const auto q = UnitQuaternion::from_rotation(min_witness);
    const auto p = UnitQuaternion::from_rotation(max_witness);
    os << "lambda_theta_min_witness = " << q.eta() << ' ' << q.eps().x() << ' ' << q.eps().y() << ' '
       << q.eps().z() << " mode " << min_witness_mode.value() << '\n';
    os << "lambda_theta_max_witness = " << p.eta() << ' ' << p.eps().x() << ' ' << p.eps().y() << ' '
       << p.eps().z() << " mode " << max_witness_mode.value() << '\n';
    return os.str();
}

namespace {

struct EigenExtrema {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::size_t min_index = 0, max_index = 0;
    ModeIndex min_mode, max_mode;
};

void scan(const std::vector<Rotation>& samples, std::size_t begin, std::size_t end,
          const WarpedPotentialConfig& cfg, EigenExtrema& out) {
    for (std::size_t i = begin; i < end; ++i) {
        for (ModeIndex m : ModeIndex::all()) {
            const Matrix3 t = theta_q(samples[i], m, cfg);
            const Eigen::SelfAdjointEigenSolver<Matrix3> es(t * t.transpose(), Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(2);
            if (lo < out.min) out.min = lo, out.min_index = i, out.min_mode = m;
            if (hi > out.max) out.max = hi, out.max_index = i, out.max_mode = m;
        }
    }
}

}  // namespace

SynergismBounds synergism_bounds(const WarpedPotentialConfig& cfg, std::int64_t sample_count, std::uint64_t seed,
                                 unsigned workers) {
    cfg.validate(false);
    if (sample_count < 1) throw InvalidConfig("sample_count must be positive");
    std::mt19937_64 rng(seed);
    std::vector<Rotation> samples;
    samples.reserve(static_cast<std::size_t>(sample_count));
    for (std::int64_t i = 0; i < sample_count; ++i) samples.push_back(random_rotation(rng));

    workers = std::max(1u, workers);
    std::vector<EigenExtrema> shards(workers);
    const std::size_t n = samples.size();
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t b = n * w / workers, e = n * (w + 1) / workers;
        if (workers == 1) scan(samples, b, e, cfg, shards[w]);
        else pool.emplace_back([&, b, e, w] { scan(samples, b, e, cfg, shards[w]); });
    }
    for (auto& t : pool) t.join();

    // Shards are contiguous and merged in order with strict comparisons,
    // so the earliest extremal sample wins regardless of the shard count.
    EigenExtrema total;
    for (const auto& s : shards) {
        if (s.min < total.min) total.min = s.min, total.min_index = s.min_index, total.min_mode = s.min_mode;
        if (s.max > total.max) total.max = s.max, total.max_index = s.max_index, total.max_mode = s.max_mode;
    }

    SynergismBounds b;
    b.alpha1 = alpha1(cfg.k);
    b.alpha2 = alpha2(cfg.k);
    b.lambda_theta_min = total.min;
    b.lambda_theta_max = total.max;
    b.alpha3 = total.min * b.alpha1 / 4.0;
    b.alpha4 = total.max * b.alpha2 / 8.0;
    b.delta_bar = delta_bar(cfg.k);
    b.sample_count = sample_count;
    b.min_witness = samples[total.min_index];
    b.min_witness_mode = total.min_mode;
    b.max_witness = samples[total.max_index];
    b.max_witness_mode = total.max_mode;
    return b;
}

}  // namespace synergy
