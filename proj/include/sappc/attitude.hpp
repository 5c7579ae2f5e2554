#pragma once

// Quaternion algebra and rigid-body attitude error kinematics/dynamics.
//
// Quaternions are Eigen::Quaternion (Hamilton convention, scalar w, vector
// part vec()). Files and configs store them scalar-last as (x, y, z, w).
// The error quaternion is q_e = q_d^{-1} (x) q_s, and C_e maps vectors
// expressed in the desired frame into the body frame.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "sappc/errors.hpp"

namespace sappc {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Vec4 = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Quat = Eigen::Quaternion<Scalar>;

using Vector3 = Vec3<double>;
using Vector4 = Vec4<double>;
using Matrix3 = Mat3<double>;
using Quaternion = Quat<double>;

/// |q_e0| below this makes the Jacobian non-invertible.
inline constexpr double kJacobianSingularity = 1e-6;

template <typename Derived>
Mat3<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& v) {
  using S = typename Derived::Scalar;
  Mat3<S> m;
  m << S(0), -v(2), v(1),
       v(2), S(0), -v(0),
       -v(1), v(0), S(0);
  return m;
}

/// Builds a quaternion from scalar-last storage (x, y, z, w).
template <typename Derived>
Quat<typename Derived::Scalar> from_xyzw(const Eigen::MatrixBase<Derived>& xyzw) {
  return Quat<typename Derived::Scalar>(xyzw(3), xyzw(0), xyzw(1), xyzw(2));
}

template <typename Scalar>
Vec4<Scalar> to_xyzw(const Quat<Scalar>& q) {
  return Vec4<Scalar>(q.x(), q.y(), q.z(), q.w());
}

template <typename Scalar>
Quat<Scalar> quat_multiply(const Quat<Scalar>& a, const Quat<Scalar>& b) {
  return (a * b).normalized();
}

template <typename Scalar>
Quat<Scalar> error_quaternion(const Quat<Scalar>& q_s, const Quat<Scalar>& q_d) {
  return (q_d.conjugate() * q_s).normalized();
}

/// C_e = (q0^2 - qv'qv) I + 2 qv qv' - 2 q0 qv^x
template <typename Scalar>
Mat3<Scalar> rotation_matrix(const Quat<Scalar>& q) {
  const Vec3<Scalar> v = q.vec();
  const Scalar w = q.w();
  return (w * w - v.squaredNorm()) * Mat3<Scalar>::Identity() + Scalar(2) * v * v.transpose() -
         Scalar(2) * w * skew(v);
}

/// Gamma = 0.5 (q0 I + qv^x); maps error rate to the vector-part rate.
template <typename Scalar>
Mat3<Scalar> jacobian(const Quat<Scalar>& q) {
  return Scalar(0.5) * (q.w() * Mat3<Scalar>::Identity() + skew(q.vec()));
}

/// Closed-form inverse of Gamma. (aI + b^x)^{-1} = (a^2 I + b b' - a b^x) / (a (a^2 + |b|^2)).
template <typename Scalar>
Mat3<Scalar> jacobian_inverse(const Quat<Scalar>& q) {
  const Scalar a = q.w();
  if (!(std::abs(a) >= Scalar(kJacobianSingularity))) throw SingularJacobian(double(a));
  const Vec3<Scalar> b = q.vec();
  const Scalar den = a * (a * a + b.squaredNorm());
  return Scalar(2) * (a * a * Mat3<Scalar>::Identity() + b * b.transpose() - a * skew(b)) / den;
}

template <typename Scalar>
struct Inertia {
  Mat3<Scalar> J;
  Mat3<Scalar> J_inv;
  Scalar j_min;
  Scalar j_max;

  explicit Inertia(const Mat3<Scalar>& m) : J(m) {
    if (((m - m.transpose()).cwiseAbs().array() > Scalar(1e-12)).any())
      throw ValidationError("inertia", "matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3<Scalar>> es(m, Eigen::EigenvaluesOnly);
    j_min = es.eigenvalues().minCoeff();
    j_max = es.eigenvalues().maxCoeff();
    if (!(j_min > Scalar(0))) throw ValidationError("inertia", "matrix must be positive definite");
    J_inv = m.inverse();
  }

  static Inertia diagonal(Scalar a, Scalar b, Scalar c) {
    return Inertia(Vec3<Scalar>(a, b, c).asDiagonal().toDenseMatrix());
  }
};

template <typename Scalar>
struct ErrorState {
  Quat<Scalar> q_e = Quat<Scalar>::Identity();
  Vec3<Scalar> omega_e = Vec3<Scalar>::Zero();
};

/// Desired motion: omega_d(t) = A [cos(t/P1), sin(t/P2), -cos(t/P3)] rad/s in the desired frame.
template <typename Scalar>
struct ReferenceTrajectory {
  Quat<Scalar> q_d0 = Quat<Scalar>::Identity();
  Scalar amplitude = Scalar(0);
  Vec3<Scalar> periods = Vec3<Scalar>(40, 30, 50);

  Vec3<Scalar> omega_d(Scalar t) const {
    using std::cos, std::sin;
    return amplitude *
           Vec3<Scalar>(cos(t / periods(0)), sin(t / periods(1)), -cos(t / periods(2)));
  }

  Vec3<Scalar> omega_d_dot(Scalar t) const {
    using std::cos, std::sin;
    return amplitude * Vec3<Scalar>(-sin(t / periods(0)) / periods(0),
                                    cos(t / periods(1)) / periods(1),
                                    sin(t / periods(2)) / periods(2));
  }
};

/// Rate of a unit quaternion driven by a body-frame angular velocity, stored (w, x, y, z).
template <typename Scalar>
Vec4<Scalar> quaternion_rate(const Quat<Scalar>& q, const Vec3<Scalar>& omega) {
  Vec4<Scalar> r;
  r(0) = Scalar(-0.5) * q.vec().dot(omega);
  r.template tail<3>() = jacobian(q) * omega;
  return r;
}

template <typename Scalar>
struct ErrorRates {
  Vec4<Scalar> q_e_dot;  // (w, x, y, z)
  Vec3<Scalar> omega_e_dot;
};

/// Attitude error dynamics; omega_s is reconstructed as omega_e + C_e omega_d.
template <typename Scalar>
ErrorRates<Scalar> error_dynamics(const ErrorState<Scalar>& s, const ReferenceTrajectory<Scalar>& ref,
                                  const Inertia<Scalar>& inertia, const Vec3<Scalar>& u,
                                  const Vec3<Scalar>& d, Scalar t) {
  const Mat3<Scalar> C = rotation_matrix(s.q_e);
  const Vec3<Scalar> wd = C * ref.omega_d(t);
  const Vec3<Scalar> ws = s.omega_e + wd;
  ErrorRates<Scalar> r;
  r.q_e_dot = quaternion_rate(s.q_e, s.omega_e);
  r.omega_e_dot = s.omega_e.cross(wd) - C * ref.omega_d_dot(t) +
                  inertia.J_inv * (-ws.cross(inertia.J * ws) + u + d);
  return r;
}

/// The dynamics terms W0 = J w_e^x C_e w_d - J C_e w_d_dot - w_s^x J w_s.
template <typename Scalar>
Vec3<Scalar> dynamics_feedforward(const ErrorState<Scalar>& s, const ReferenceTrajectory<Scalar>& ref,
                                  const Inertia<Scalar>& inertia, Scalar t) {
  const Mat3<Scalar> C = rotation_matrix(s.q_e);
  const Vec3<Scalar> wd = C * ref.omega_d(t);
  const Vec3<Scalar> ws = s.omega_e + wd;
  return inertia.J * s.omega_e.cross(wd) - inertia.J * C * ref.omega_d_dot(t) -
         ws.cross(inertia.J * ws);
}

template <typename Scalar>
struct Pulse {
  Scalar onset;
  Scalar duration;
  Vec3<Scalar> amplitude;
};

/// Per axis: sin_amp sin(sin_harmonic w_p t) + cos_amp cos(cos_harmonic w_p t) + offset, in N m.
template <typename Scalar>
struct DisturbanceModel {
  Vec3<Scalar> sin_amp = Vec3<Scalar>::Zero();
  Vec3<Scalar> sin_harmonic = Vec3<Scalar>::Zero();
  Vec3<Scalar> cos_amp = Vec3<Scalar>::Zero();
  Vec3<Scalar> cos_harmonic = Vec3<Scalar>::Zero();
  Vec3<Scalar> offset = Vec3<Scalar>::Zero();
  Scalar omega_p = Scalar(0);
  Scalar bound = Scalar(0.06);
  std::optional<Pulse<Scalar>> pulse;
};

template <typename Scalar>
Vec3<Scalar> periodic_disturbance(const DisturbanceModel<Scalar>& m, Scalar t) {
  using std::cos, std::sin;
  Vec3<Scalar> d;
  for (int i = 0; i < 3; ++i)
    d(i) = m.sin_amp(i) * sin(m.sin_harmonic(i) * m.omega_p * t) +
           m.cos_amp(i) * cos(m.cos_harmonic(i) * m.omega_p * t) + m.offset(i);
  return d;
}

template <typename Scalar>
Vec3<Scalar> disturbance_at(const DisturbanceModel<Scalar>& m, Scalar t) {
  Vec3<Scalar> d = periodic_disturbance(m, t);
  if (m.pulse && t >= m.pulse->onset && t < m.pulse->onset + m.pulse->duration) d += m.pulse->amplitude;
  return d;
}

template <typename Scalar>
struct ActuatorLimits {
  Scalar u_max = std::numeric_limits<Scalar>::infinity();
  Scalar u_min = Scalar(0);
};

/// Per-axis saturation at u_max; commands with magnitude below u_min produce zero torque.
template <typename Scalar>
Vec3<Scalar> apply_actuator(const Vec3<Scalar>& u_cmd, const ActuatorLimits<Scalar>& lim) {
  Vec3<Scalar> u;
  for (int i = 0; i < 3; ++i) {
    const Scalar c = u_cmd(i);
    if (std::abs(c) < lim.u_min)
      u(i) = Scalar(0);
    else
      u(i) = std::clamp(c, -lim.u_max, lim.u_max);
  }
  return u;
}

}  // namespace sappc
