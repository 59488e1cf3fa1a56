#include "synergy/so3.hpp"

#include "synergy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace synergy {

double orthonormality_error(const Matrix3& m) {
    return (m.transpose() * m - Matrix3::Identity()).norm();
}

Rotation Rotation::from_matrix(const Matrix3& m, double tol) {
    if (!m.allFinite()) throw NotOrthonormal("rotation matrix has non-finite entries");
    const double err = synergy::orthonormality_error(m);
    if (err > tol) {
        std::ostringstream os;
        os << "matrix is not orthonormal: |R^T R - I|_F = " << err << " > " << tol;
        throw NotOrthonormal(os.str());
    }
    if (m.determinant() <= 0.0) throw NotOrthonormal("matrix has non-positive determinant");
    return Rotation(m, Unchecked{});
}

UnitQuaternion::UnitQuaternion(double eta, const Vector3& eps) {
    const double n = std::sqrt(eta * eta + eps.squaredNorm());
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("quaternion has zero or non-finite norm");
    eta_ = eta / n;
    eps_ = eps / n;
}

UnitQuaternion UnitQuaternion::from_rotation(const Rotation& r) {
    const Matrix3& m = r.matrix();
    const double tr = m.trace();
    // Pick the numerically dominant component first.
    double w = 0.0;
    Vector3 v;
    const double d0 = m(0, 0), d1 = m(1, 1), d2 = m(2, 2);
    if (tr >= d0 && tr >= d1 && tr >= d2) {
        w = 0.5 * std::sqrt(std::max(0.0, 1.0 + tr));
        const double s = 0.25 / w;
        v = Vector3((m(2, 1) - m(1, 2)) * s, (m(0, 2) - m(2, 0)) * s, (m(1, 0) - m(0, 1)) * s);
    } else if (d0 >= d1 && d0 >= d2) {
        const double x = 0.5 * std::sqrt(std::max(0.0, 1.0 + d0 - d1 - d2));
        const double s = 0.25 / x;
        w = (m(2, 1) - m(1, 2)) * s;
        v = Vector3(x, (m(0, 1) + m(1, 0)) * s, (m(0, 2) + m(2, 0)) * s);
    } else if (d1 >= d2) {
        const double y = 0.5 * std::sqrt(std::max(0.0, 1.0 - d0 + d1 - d2));
        const double s = 0.25 / y;
        w = (m(0, 2) - m(2, 0)) * s;
        v = Vector3((m(0, 1) + m(1, 0)) * s, y, (m(1, 2) + m(2, 1)) * s);
    } else {
        const double z = 0.5 * std::sqrt(std::max(0.0, 1.0 - d0 - d1 + d2));
        const double s = 0.25 / z;
        w = (m(1, 0) - m(0, 1)) * s;
        v = Vector3((m(0, 2) + m(2, 0)) * s, (m(1, 2) + m(2, 1)) * s, z);
    }
    if (w < 0.0) {
        w = -w;
        v = -v;
    }
    return UnitQuaternion(w, v);
}

Rotation UnitQuaternion::to_rotation() const {
    // R = (η² − εᵀε) I + 2εεᵀ + 2η[ε]_×
    const Matrix3 m = (eta_ * eta_ - eps_.squaredNorm()) * Matrix3::Identity() +
                      2.0 * eps_ * eps_.transpose() + 2.0 * eta_ * hat(eps_);
    return Rotation(m, Rotation::Unchecked{});
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
    const double eta = a.eta_ * b.eta_ - a.eps_.dot(b.eps_);
    const Vector3 eps = a.eta_ * b.eps_ + b.eta_ * a.eps_ + a.eps_.cross(b.eps_);
    return UnitQuaternion(eta, eps, UnitQuaternion::Raw{});
}

Matrix3 hat(const Vector3& v) {
    Matrix3 s;
    s << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return s;
}

Vector3 vee(const Matrix3& s, double tol) {
    const Matrix3 sym = 0.5 * (s + s.transpose());
    if (sym.cwiseAbs().maxCoeff() > tol) {
        std::ostringstream os;
        os << "vee: input is not skew-symmetric (symmetric part " << sym.cwiseAbs().maxCoeff() << ")";
        throw NonSkewInput(os.str());
    }
    return Vector3(s(2, 1), s(0, 2), s(1, 0));
}

Vector3 psi(const Matrix3& a) {
    return 0.5 * Vector3(a(2, 1) - a(1, 2), a(0, 2) - a(2, 0), a(1, 0) - a(0, 1));
}

double attitude_distance_sq(const Rotation& r) {
    return std::clamp((3.0 - r.matrix().trace()) / 4.0, 0.0, 1.0);
}

Rotation rot_angle_axis(double theta, const Vector3& u) {
    if (std::abs(u.norm() - 1.0) > kConstructionTolerance) throw NonUnitAxis("rotation axis must be a unit vector");
    const Matrix3 k = hat(u);
    const Matrix3 m = Matrix3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
    return Rotation(m, Rotation::Unchecked{});
}

Rotation exp_map(const Vector3& w) {
    const double angle = w.norm();
    if (angle == 0.0) return Rotation::identity();
    if (angle < 1e-8) {
        // Second-order series; exact to double precision at this angle.
        const Matrix3 k = hat(w);
        return Rotation::from_matrix(Matrix3::Identity() + k + 0.5 * k * k, kIntegrationTolerance);
    }
    return rot_angle_axis(angle, w / angle);
}

Rotation integrate_rotation_step(const Rotation& r, const Vector3& omega, double dt) {
    if (dt < 0.0) throw std::invalid_argument("integrate_rotation_step: dt must be non-negative");
    if (omega.isZero(0.0) || dt == 0.0) return r;
    return r * exp_map(omega * dt);
}

Vector3 random_unit_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        Vector3 v(n(rng), n(rng), n(rng));
        const double len = v.norm();
        if (len > 1e-12) return v / len;
    }
}

Rotation random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (;;) {
        const double a = n(rng), b = n(rng), c = n(rng), d = n(rng);
        if (a * a + b * b + c * c + d * d > 1e-12) return UnitQuaternion(a, Vector3(b, c, d)).to_rotation();
    }
}

}  // namespace synergy
