#include "synergy/analysis.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace synergy {

double lyapunov_W(const Rotation& r, ModeIndex q, const Vector3& omega, const WarpedPotentialConfig& cfg,
                  const ControllerGains& gains, const LyapunovConfig& lyap) {
    const double u = potential_U(r, q, cfg);
    const double cross = lyap.c == 0.0 ? 0.0 : lyap.c * omega.dot(body_gradient(r, q, cfg));
    return 0.5 * gains.k_c * u + 0.5 * omega.squaredNorm() + cross;
}

double lyapunov_Ws(const Rotation& r, ModeIndex q, const Vector3& omega, const Vector3& x_tilde,
                   const WarpedPotentialConfig& cfg, const ControllerGains& gains, const LyapunovConfig& lyap) {
    const double u = potential_U(r, q, cfg);
    const double cross = lyap.c1 == 0.0 ? 0.0 : lyap.c1 * body_gradient(r, q, cfg).dot(omega);
    return 0.5 * gains.k_c * u + 0.5 * omega.squaredNorm() + cross + 0.5 * lyap.c2 * x_tilde.squaredNorm();
}

double omega_bound(const Vector3& omega0, const ControllerGains& gains, double alpha4) {
    return omega0.norm() + gains.k_c / gains.k_omega * std::sqrt(alpha4 / 2.0);
}

double CrossTermLimits::ceiling() const { return std::min({positivity, flow, jump}); }

CrossTermLimits admissible_c(const ControllerGains& g, const SynergismBounds& b, double d_x, double delta,
                             double b_omega) {
    CrossTermLimits lim;
    lim.positivity = 2.0 * std::sqrt(g.k_c / b.alpha4);
    lim.flow = 4.0 * g.k_c * g.k_omega * b.alpha3 /
               (4.0 * d_x * g.k_c * b.alpha3 + g.k_omega * g.k_omega * b.alpha4);
    lim.jump = g.k_c * delta / (8.0 * b_omega * std::sqrt(b.alpha4 / 2.0));
    return lim;
}

SmoothLyapunovWeights smooth_lyapunov_weights(const ControllerGains& g, const SynergismBounds& b, double d_x,
                                              double delta, double b_omega, double b_xtilde) {
    SmoothLyapunovWeights out;
    double c2 = g.k_c / d_x;
    if (b_xtilde > 0.0) c2 = std::min(c2, 0.5 * g.k_c * delta / (8.0 * b_xtilde * b_xtilde));
    const double sq = std::sqrt(b.alpha4 / 2.0);
    const double c1 = 0.5 * std::min({g.k_c * g.k_omega * b.alpha3 /
                                          (g.k_omega * g.k_omega * b.alpha4 + 2.0 * g.k_c * d_x * b.alpha3),
                                      c2 * g.k_s * b.alpha3 / (g.k_c * b.alpha4), 2.0 * std::sqrt(g.k_c / b.alpha4),
                                      g.k_c * delta / (16.0 * sq * b_omega)});
    out.weights.c1 = c1;
    out.weights.c2 = c2;
    out.k_s_lower_bound = (g.k_c + c2 * d_x) * (g.k_c + c2 * d_x) / (c2 * g.k_omega);
    return out;
}

double estimate_dx_surrogate(const WarpedPotentialConfig& cfg, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(1, ModeIndex::kCount);
    const double h = 1e-6;
    double worst = 0.0;
    int accepted = 0;
    while (accepted < samples) {
        const Rotation r = random_rotation(rng);
        const ModeIndex q(pick(rng));
        if (!in_flow_set(synergy_gap(r, q, cfg), cfg)) continue;
        ++accepted;
        Matrix3 x;
        for (int i = 0; i < 3; ++i) {
            const Vector3 e = Vector3::Unit(i);
            x.col(i) = (body_gradient(r * exp_map(h * e), q, cfg) - body_gradient(r * exp_map(-h * e), q, cfg)) /
                       (2.0 * h);
        }
        worst = std::max(worst, x.norm());
    }
    return 2.0 * worst;
}

std::vector<std::pair<std::size_t, std::size_t>> jump_sample_pairs(const HybridTrajectory& traj) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& a = traj.samples[i - 1].time;
        const auto& b = traj.samples[i].time;
        if (b.j == a.j + 1 && b.t == a.t) out.emplace_back(i - 1, i);
    }
    return out;
}

MonotonicityAudit audit_monotone(const HybridTrajectory& traj, const std::vector<double>& values,
                                 double flow_tolerance, double required_jump_drop) {
    MonotonicityAudit a;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& t0 = traj.samples[i - 1].time;
        const auto& t1 = traj.samples[i].time;
        const double dv = values[i] - values[i - 1];
        if (t1.j == t0.j) {
            ++a.flow_intervals;
            a.max_flow_increase = std::max(a.max_flow_increase, dv);
            if (dv > flow_tolerance) ++a.flow_violations;
        } else {
            ++a.jumps;
            a.min_jump_drop = std::min(a.min_jump_drop, -dv);
            if (required_jump_drop >= 0.0 && !(-dv > required_jump_drop)) ++a.jump_violations;
        }
    }
    return a;
}

bool audit_jump_decrease(const HybridTrajectory& traj, double delta, double tol) {
    return std::all_of(traj.jumps.begin(), traj.jumps.end(),
                       [&](const JumpEvent& e) { return e.merit_after <= e.merit_before - delta + tol; });
}

bool audit_post_jump_gap(const HybridTrajectory& traj, double tol) {
    const std::size_t gap = traj.diagnostic_index("gap");
    for (const auto& [pre, post] : jump_sample_pairs(traj))
        if (std::abs(traj.samples[post].diagnostics[gap]) > tol) return false;
    return true;
}

DecayRateAudit audit_decay_rate(const HybridTrajectory& traj, double k_c, double alpha3, double slack,
                                double floor) {
    DecayRateAudit a;
    a.worst_ratio = std::numeric_limits<double>::infinity();
    const std::size_t iu = traj.diagnostic_index("U");
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& s0 = traj.samples[i - 1];
        const auto& s1 = traj.samples[i];
        if (s0.time.j != s1.time.j) continue;
        const double u0 = s0.diagnostics[iu], u1 = s1.diagnostics[iu];
        if (u1 < floor) continue;
        const double dt = s1.time.t - s0.time.t;
        if (!(dt > 0.0)) continue;
        // The finite-difference slope is an average over the interval, so it
        // is compared against the larger endpoint value of U.
        const double rate = (u1 - u0) / dt;
        const double bound = -(1.0 - slack) * k_c * alpha3 * std::max(u0, u1);
        ++a.checked;
        a.worst_ratio = std::min(a.worst_ratio, rate / (-k_c * alpha3 * std::max(u0, u1)));
        if (rate > bound) ++a.violations;
    }
    return a;
}

double max_input_discontinuity(const HybridTrajectory& traj, const std::string& prefix) {
    const std::size_t ix = traj.diagnostic_index(prefix + "_x");
    const std::size_t iy = traj.diagnostic_index(prefix + "_y");
    const std::size_t iz = traj.diagnostic_index(prefix + "_z");
    double worst = 0.0;
    for (const auto& [pre, post] : jump_sample_pairs(traj)) {
        const auto& a = traj.samples[pre].diagnostics;
        const auto& b = traj.samples[post].diagnostics;
        const Vector3 d(b[ix] - a[ix], b[iy] - a[iy], b[iz] - a[iz]);
        worst = std::max(worst, d.norm());
    }
    return worst;
}

double max_diagnostic(const HybridTrajectory& traj, const std::string& name) {
    const std::size_t i = traj.diagnostic_index(name);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples) worst = std::max(worst, s.diagnostics[i]);
    return worst;
}

double max_flow_gap(const HybridTrajectory& traj) {
    const std::size_t gap = traj.diagnostic_index("gap");
    // Pre-jump samples sit in D by construction; only genuine flow samples count.
    std::vector<bool> pre(traj.samples.size(), false);
    for (const auto& [a, b] : jump_sample_pairs(traj)) pre[a] = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        if (!pre[i]) worst = std::max(worst, traj.samples[i].diagnostics[gap]);
    return worst;
}

SignalSelector diagnostic_signal(std::string name) {
    return [name = std::move(name)](const HybridTrajectory& traj, const TrajectorySample& s) {
        return traj.diagnostic(s, name);
    };
}

RateFit fit_exponential_rate(const std::vector<HybridTime>& times, const std::vector<double>& values,
                             const RateFitOptions& options) {
    if (times.size() != values.size()) throw std::invalid_argument("fit_exponential_rate: size mismatch");
    RateFit fit;
    if (times.empty()) throw DegenerateWindow("rate fit window is empty");
    const double s0 = times.front().t + times.front().j;
    const double s1 = times.back().t + times.back().j;
    const double start = s0 + options.transient_fraction * (s1 - s0);

    std::vector<double> xs, ys;
    std::vector<HybridTime> used;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double s = times[i].t + times[i].j;
        if (s < start) continue;
        if (!(values[i] >= options.floor)) break;
        xs.push_back(s);
        ys.push_back(std::log(values[i]));
        used.push_back(times[i]);
    }
    if (xs.size() < 10) {
        std::ostringstream os;
        os << "rate fit window has " << xs.size() << " usable samples (need 10)";
        throw DegenerateWindow(os.str());
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        yy += ys[i] * ys[i];
    }
    if (!(sxx > 0.0)) throw DegenerateWindow("rate fit window spans zero hybrid time");
    const double slope = sxy / sxx;
    fit.lambda = -slope;
    // A perfectly flat signal is explained exactly by a zero rate.
    fit.r_squared = syy > 1e-28 * yy ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    if (std::abs(fit.lambda) < 1e-300) fit.lambda = 0.0;
    fit.window_begin = used.front();
    fit.window_end = used.back();
    fit.samples = static_cast<int>(xs.size());
    return fit;
}

RateFit fit_exponential_rate(const HybridTrajectory& traj, const SignalSelector& signal,
                             const RateFitOptions& options) {
    std::vector<HybridTime> times;
    std::vector<double> values;
    times.reserve(traj.samples.size());
    values.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        times.push_back(s.time);
        values.push_back(signal(traj, s));
    }
    return fit_exponential_rate(times, values, options);
}

GradientCheckReport gradient_check(const WarpedPotentialConfig& cfg, int samples, std::uint64_t seed, double h) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(1, ModeIndex::kCount);
    GradientCheckReport rep;
    rep.step = h;
    while (rep.samples < samples) {
        const Rotation r = random_rotation(rng);
        const ModeIndex q(pick(rng));
        if (!in_flow_set(synergy_gap(r, q, cfg), cfg)) continue;
        ++rep.samples;
        Vector3 fd;
        for (int i = 0; i < 3; ++i) {
            const Vector3 e = Vector3::Unit(i);
            fd(i) = (potential_U(r * exp_map(h * e), q, cfg) - potential_U(r * exp_map(-h * e), q, cfg)) / (2.0 * h);
        }
        const Vector3 analytic = 2.0 * body_gradient(r, q, cfg);
        const double rel = (fd - analytic).norm() / std::max(analytic.norm(), 1e-8);
        rep.max_relative_error = std::max(rep.max_relative_error, rel);
    }
    return rep;
}

std::string ExpSynergismReport::to_report() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "samples = " << samples << '\n'
       << "pairs = " << pairs << '\n'
       << "flow_pairs = " << flow_pairs << '\n'
       << "slack = " << slack << '\n'
       << "sandwich_violations = " << sandwich_violations << '\n'
       << "sandwich_worst_lower_margin = " << sandwich_worst_lower << '\n'
       << "sandwich_worst_upper_margin = " << sandwich_worst_upper << '\n'
       << "gradient_violations = " << gradient_violations << '\n'
       << "gradient_ratio_min = " << gradient_ratio_min << '\n'
       << "gradient_ratio_max = " << gradient_ratio_max << '\n'
       << "domain_violations = " << domain_violations << '\n'
       << "domain_worst_margin = " << domain_worst_margin << '\n'
       << "passed = " << (passed() ? "true" : "false") << '\n';
    return os.str();
}

ExpSynergismReport verify_exp_synergism(const WarpedPotentialConfig& cfg, const SynergismBounds& bounds,
                                        std::int64_t sample_count, std::uint64_t seed, double slack) {
    cfg.validate(false);
    ExpSynergismReport rep;
    rep.samples = sample_count;
    rep.slack = slack;
    rep.sandwich_worst_lower = std::numeric_limits<double>::infinity();
    rep.sandwich_worst_upper = std::numeric_limits<double>::infinity();
    rep.gradient_ratio_min = std::numeric_limits<double>::infinity();
    rep.gradient_ratio_max = 0.0;
    rep.domain_worst_margin = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(seed);
    const double a3 = (1.0 - slack) * bounds.alpha3;
    const double a4 = (1.0 + slack) * bounds.alpha4;
    for (std::int64_t i = 0; i < sample_count; ++i) {
        const Rotation r = random_rotation(rng);
        const double d2 = attitude_distance_sq(r);
        std::array<double, ModeIndex::kCount> u{};
        for (ModeIndex m : ModeIndex::all()) u[m.value() - 1] = potential_U(r, m, cfg);
        const double umin = *std::min_element(u.begin(), u.end());
        for (ModeIndex m : ModeIndex::all()) {
            ++rep.pairs;
            const double um = u[m.value() - 1];
            const double tol = 1e-12 * (1.0 + d2);
            if (um < bounds.alpha1 * d2 - tol || um > bounds.alpha2 * d2 + tol) ++rep.sandwich_violations;
            if (d2 > 0.0) {
                rep.sandwich_worst_lower = std::min(rep.sandwich_worst_lower, um / d2 - bounds.alpha1);
                rep.sandwich_worst_upper = std::min(rep.sandwich_worst_upper, bounds.alpha2 - um / d2);
            }
            if (!in_flow_set(um - umin, cfg)) continue;
            ++rep.flow_pairs;
            const double margin = 1.0 - attitude_distance_sq(gamma(r, m, cfg));
            rep.domain_worst_margin = std::min(rep.domain_worst_margin, margin);
            if (margin < cfg.singularity_guard) {
                ++rep.domain_violations;
                continue;
            }
            const Vector3 xr = body_gradient(r, m, cfg);
            const double grad_sq = 2.0 * xr.squaredNorm();
            if (d2 > 0.0) {
                rep.gradient_ratio_min = std::min(rep.gradient_ratio_min, grad_sq / d2);
                rep.gradient_ratio_max = std::max(rep.gradient_ratio_max, grad_sq / d2);
            }
            if (grad_sq < a3 * d2 || grad_sq > a4 * d2) ++rep.gradient_violations;
        }
    }
    return rep;
}

std::vector<Vector3> fibonacci_sphere(int n) {
    std::vector<Vector3> out;
    out.reserve(static_cast<std::size_t>(n));
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        out.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
        out.back().normalize();
    }
    return out;
}

namespace {

double eta_warped(double theta, double c, double k) {
    const double s = std::sin(0.5 * theta);
    return std::cos(0.5 * theta) * std::sqrt(1.0 - k * k * s * s * s * s) - k * s * s * s * c;
}

}  // namespace

bool GapProbeReport::gaps_exceed_delta_bar() const {
    return !probes.empty() &&
           std::all_of(probes.begin(), probes.end(), [&](const GapProbe& p) { return p.gap >= delta_bar; });
}

bool GapProbeReport::eps_above_floor() const {
    return std::all_of(probes.begin(), probes.end(),
                       [&](const GapProbe& p) { return p.eps_sq >= eps_sq_floor - 1e-12; });
}

std::vector<std::string> GapProbeReport::failures() const {
    std::vector<std::string> out;
    if (!gaps_exceed_delta_bar()) out.emplace_back("singular gap below delta_bar");
    if (!eps_above_floor()) out.emplace_back("singular |eps|^2 below its floor");
    if (!delta_exceeds_delta_bar()) out.emplace_back("configured delta does not exceed delta_bar");
    if (!singular_gap_exceeds_delta()) out.emplace_back("singular gap does not exceed delta (flow set meets the singular set)");
    return out;
}

std::string GapProbeReport::to_report() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "k = " << k << '\n'
       << "delta = " << delta << '\n'
       << "delta_bar = " << delta_bar << '\n'
       << "eps_sq_floor = " << eps_sq_floor << '\n'
       << "probes = " << probes.size() << '\n'
       << "bracket_failures = " << bracket_failures << '\n'
       << "min_gap = " << min_gap << '\n'
       << "worst_margin = " << worst_margin << '\n'
       << "gaps_exceed_delta_bar = " << (gaps_exceed_delta_bar() ? "true" : "false") << '\n'
       << "eps_above_floor = " << (eps_above_floor() ? "true" : "false") << '\n'
       << "delta_exceeds_delta_bar = " << (delta_exceeds_delta_bar() ? "true" : "false") << '\n'
       << "singular_gap_exceeds_delta = " << (singular_gap_exceeds_delta() ? "true" : "false") << '\n'
       << "passed = " << (passed() ? "true" : "false") << '\n';
    return os.str();
}

std::string GapProbeReport::to_csv() const {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "axis_x,axis_y,axis_z,mode,angle,eta_q,warped_distance,eps_sq,gap,gap_quaternion\n";
    for (const auto& p : probes)
        os << p.axis.x() << ',' << p.axis.y() << ',' << p.axis.z() << ',' << p.mode.value() << ',' << p.angle << ','
           << p.eta_q << ',' << p.warped_distance << ',' << p.eps_sq << ',' << p.gap << ',' << p.gap_quaternion
           << '\n';
    return os.str();
}

GapProbeReport probe_singular_gap(const WarpedPotentialConfig& cfg, const std::vector<Vector3>& axes,
                                  const std::vector<ModeIndex>& modes) {
    cfg.validate(false);
    GapProbeReport rep;
    rep.k = cfg.k;
    rep.delta = cfg.delta;
    rep.delta_bar = delta_bar(cfg.k);
    rep.eps_sq_floor = (-1.0 + std::sqrt(1.0 + 4.0 * cfg.k * cfg.k)) / (2.0 * cfg.k * cfg.k);

    for (const Vector3& v : axes) {
        for (ModeIndex q : modes) {
            const double c = v.dot(cfg.axis(q));
            double lo = 0.5 * std::numbers::pi, hi = std::numbers::pi;
            if (!(eta_warped(lo, c, cfg.k) > 0.0 && eta_warped(hi, c, cfg.k) < 0.0)) {
                ++rep.bracket_failures;
                continue;
            }
            for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid == lo || mid == hi) break;
                (eta_warped(mid, c, cfg.k) > 0.0 ? lo : hi) = mid;
            }
            const double theta = 0.5 * (lo + hi);
            GapProbe p;
            p.axis = v;
            p.mode = q;
            p.angle = theta;
            p.eta_q = eta_warped(theta, c, cfg.k);
            if (std::abs(p.eta_q) > 1e-10) {
                ++rep.bracket_failures;
                continue;
            }
            const Rotation r = rot_angle_axis(theta, v);
            const UnitQuaternion quat(std::cos(0.5 * theta), std::sin(0.5 * theta) * v);
            p.eps_sq = quat.eps().squaredNorm();
            p.warped_distance = attitude_distance(gamma(r, q, cfg));
            p.gap = synergy_gap(r, q, cfg);
            double max_eta = 0.0;
            for (ModeIndex m : ModeIndex::all())
                max_eta = std::max(max_eta, std::abs(warped_quaternion(quat, m, cfg).eta()));
            p.gap_quaternion = max_eta;
            rep.min_gap = std::min(rep.min_gap, p.gap);
            rep.probes.push_back(p);
        }
    }
    rep.worst_margin = rep.min_gap - rep.delta_bar;
    return rep;
}

}  // namespace synergy
