#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>

namespace synergy {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Orthonormality tolerance applied when a rotation is built from raw data.
inline constexpr double kConstructionTolerance = 1e-9;
/// Orthonormality tolerance applied to integrated states.
inline constexpr double kIntegrationTolerance = 1e-6;

/// Frobenius norm of RᵀR − I.
double orthonormality_error(const Matrix3& m);

/**
 * An element of SO(3).
 *
 * The only ways to obtain a Rotation are the checked factory
 * `from_matrix`, the closed-form constructors below (angle-axis,
 * quaternion) and group operations, so every instance satisfies
 * ‖RᵀR − I‖_F ≤ tolerance and det R > 0.
 */
class Rotation {
public:
    Rotation() : m_(Matrix3::Identity()) {}

    static Rotation identity() { return Rotation{}; }

    /// Throws NotOrthonormal when `m` is not a proper rotation within `tol`.
    static Rotation from_matrix(const Matrix3& m, double tol = kConstructionTolerance);

    const Matrix3& matrix() const { return m_; }
    double operator()(int r, int c) const { return m_(r, c); }

    Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }
    Rotation operator*(const Rotation& other) const { return Rotation(m_ * other.m_, Unchecked{}); }
    Vector3 operator*(const Vector3& v) const { return m_ * v; }

    double orthonormality_error() const { return synergy::orthonormality_error(m_); }

private:
    struct Unchecked {};
    Rotation(const Matrix3& m, Unchecked) : m_(m) {}

    friend Rotation rot_angle_axis(double theta, const Vector3& u);
    friend class UnitQuaternion;

    Matrix3 m_;
};

/// Unit quaternion (η, ε) with η the scalar part.
class UnitQuaternion {
public:
    UnitQuaternion() : eta_(1.0), eps_(Vector3::Zero()) {}
    /// Normalizes the input; throws std::invalid_argument on a zero quaternion.
    UnitQuaternion(double eta, const Vector3& eps);

    static UnitQuaternion identity() { return {}; }
    /// Shepperd-style extraction; the returned representative has η ≥ 0.
    static UnitQuaternion from_rotation(const Rotation& r);

    double eta() const { return eta_; }
    const Vector3& eps() const { return eps_; }

    UnitQuaternion conjugate() const { return UnitQuaternion(eta_, -eps_, Raw{}); }
    UnitQuaternion operator-() const { return UnitQuaternion(-eta_, -eps_, Raw{}); }
    Rotation to_rotation() const;

    friend UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

private:
    struct Raw {};
    UnitQuaternion(double eta, const Vector3& eps, Raw) : eta_(eta), eps_(eps) {}

    double eta_;
    Vector3 eps_;
};

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b);

inline UnitQuaternion quat_from_rotation(const Rotation& r) { return UnitQuaternion::from_rotation(r); }
inline Rotation rotation_from_quat(const UnitQuaternion& q) { return q.to_rotation(); }
inline UnitQuaternion quat_multiply(const UnitQuaternion& a, const UnitQuaternion& b) { return a * b; }

/// [v]_×, so that hat(v)·w = v × w.
Matrix3 hat(const Vector3& v);

/// Inverse of hat. Throws NonSkewInput if the symmetric part exceeds `tol`.
Vector3 vee(const Matrix3& s, double tol = kConstructionTolerance);

/// vex of the skew-symmetric projection (A − Aᵀ)/2.
Vector3 psi(const Matrix3& a);
inline Vector3 psi(const Rotation& r) { return psi(r.matrix()); }

/// |R|_I² = tr(I − R)/4 = sin²(θ/2), clamped to [0, 1].
double attitude_distance_sq(const Rotation& r);
inline double attitude_distance(const Rotation& r) { return std::sqrt(attitude_distance_sq(r)); }

/// I + sin θ [u]_× + (1 − cos θ)[u]_×². Throws NonUnitAxis if ‖u‖ ≠ 1.
Rotation rot_angle_axis(double theta, const Vector3& u);

/// Exponential map exp([w]_×) for an arbitrary rotation vector.
Rotation exp_map(const Vector3& w);

/// R · exp(dt [ω]_×), the exact step of Ṙ = R[ω]_× under constant ω.
Rotation integrate_rotation_step(const Rotation& r, const Vector3& omega, double dt);

/// Haar-uniform rotation from a normalized Gaussian 4-vector.
Rotation random_rotation(std::mt19937_64& rng);

/// Uniform point on the unit sphere.
Vector3 random_unit_vector(std::mt19937_64& rng);

}  // namespace synergy
