#include <cmath>
#include <random>

#include <doctest.h>

#include "sappc/errors.hpp"

#include "sappc/attitude.hpp"

using namespace sappc;

namespace {

Quaternion random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Quaternion(n(rng), n(rng), n(rng), n(rng)).normalized();
}

bool same_rotation(const Quaternion& a, const Quaternion& b, double tol) {
  return std::min((a.coeffs() - b.coeffs()).norm(), (a.coeffs() + b.coeffs()).norm()) < tol;
}

}  // namespace

TEST_CASE("hamilton product") {
  std::mt19937_64 rng(7);
  const Quaternion q = random_unit(rng);
  CHECK(same_rotation(quat_multiply(Quaternion::Identity(), q), q, 1e-15));
  CHECK(same_rotation(quat_multiply(q, q.conjugate()), Quaternion::Identity(), 1e-15));

  const double h = std::sqrt(0.5);
  const Quaternion a(h, h, 0.0, 0.0);
  const Quaternion sq = quat_multiply(a, a);
  // w = h^2 - h^2, v = 2 h h e_x
  CHECK(sq.w() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sq.x() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(sq.y()) < 1e-15);
  CHECK(std::abs(sq.z()) < 1e-15);
}

TEST_CASE("error quaternion") {
  std::mt19937_64 rng(11);
  const Quaternion q = random_unit(rng);
  CHECK(same_rotation(error_quaternion(q, q), Quaternion::Identity(), 1e-14));
  CHECK(same_rotation(error_quaternion(q, Quaternion::Identity()), q, 1e-14));

  const Quaternion q_s = from_xyzw(Vector4(0.3254, 0.4068, -0.3254, 0.7891));
  const Quaternion q_e = error_quaternion(q_s, Quaternion::Identity());
  // The listed initial attitude is unit to 4 digits, normalization moves it by < 1e-4.
  CHECK((q_e.vec() - Vector3(0.3254, 0.4068, -0.3254)).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("rotation matrix") {
  CHECK(rotation_matrix(Quaternion::Identity()).isApprox(Matrix3::Identity(), 1e-15));
  const Matrix3 c = rotation_matrix(Quaternion(0.0, 1.0, 0.0, 0.0));
  CHECK(c.isApprox(Vector3(1, -1, -1).asDiagonal().toDenseMatrix(), 1e-15));

  std::mt19937_64 rng(3);
  double worst = 0.0, det_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Matrix3 r = rotation_matrix(random_unit(rng));
    worst = std::max(worst, (r * r.transpose() - Matrix3::Identity()).cwiseAbs().maxCoeff());
    det_err = std::max(det_err, std::abs(r.determinant() - 1.0));
  }
  CHECK(worst < 1e-10);
  CHECK(det_err < 1e-10);
}

TEST_CASE("rotation matrix maps inertial vectors into the body frame") {
  // Independent oracle: Eigen's active rotation, transposed.
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const Quaternion q = random_unit(rng);
    CHECK(rotation_matrix(q).isApprox(q.toRotationMatrix().transpose(), 1e-12));
  }
}

TEST_CASE("kinematic jacobian") {
  CHECK(jacobian(Quaternion::Identity()).isApprox(0.5 * Matrix3::Identity(), 1e-15));
  const Quaternion singular(0.0, 0.6, 0.0, 0.8);
  CHECK(std::abs(jacobian(singular).determinant()) < 1e-15);
  CHECK_THROWS_AS(jacobian_inverse(singular), SingularJacobian);

  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const Quaternion q = random_unit(rng);
    CHECK(std::abs((2.0 * jacobian(q)).determinant() - q.w()) < 1e-12);
    if (std::abs(q.w()) > 1e-3) CHECK((jacobian_inverse(q) * jacobian(q)).isApprox(Matrix3::Identity(), 1e-9));
  }
}

TEST_CASE("error dynamics") {
  const auto inertia = Inertia<double>::diagonal(4, 4, 4);
  ReferenceTrajectory<double> still;
  const ErrorState<double> eq;
  const Vector3 zero = Vector3::Zero();
  const auto r = error_dynamics(eq, still, inertia, zero, zero, 0.0);
  CHECK(r.q_e_dot.norm() == 0.0);
  CHECK(r.omega_e_dot.norm() == 0.0);

  // Identity error, zero error rate: only the reference acceleration and
  // gyroscopic term of the reference rate remain.
  const auto j = Inertia<double>::diagonal(3, 4, 5);
  ReferenceTrajectory<double> moving;
  moving.amplitude = 0.01;
  const double t = 7.0;
  const Vector3 wd = moving.omega_d(t);
  const Vector3 expected = -moving.omega_d_dot(t) - j.J_inv * wd.cross(j.J * wd);
  const auto m = error_dynamics(eq, moving, j, zero, zero, t);
  CHECK((m.omega_e_dot - expected).norm() < 1e-15);
}

TEST_CASE("periodic disturbance at t = 0") {
  DisturbanceModel<double> m;
  m.sin_amp = Vector3(0.004, -0.0015, 0.003);
  m.sin_harmonic = Vector3(1, 1, 1);
  m.cos_amp = Vector3(0.003, 0.003, -0.008);
  m.cos_harmonic = Vector3(1, 1, 1);
  m.offset = Vector3(-0.02, 0.02, 0.02);
  m.omega_p = 0.1;
  const Vector3 d = disturbance_at(m, 0.0);
  CHECK((d - Vector3(-0.017, 0.023, 0.012)).norm() < 1e-15);

  m.pulse = Pulse<double>{50.0, 0.5, Vector3(1, 1, 1)};
  CHECK((disturbance_at(m, 50.2) - periodic_disturbance(m, 50.2) - Vector3(1, 1, 1)).norm() < 1e-15);
  CHECK(disturbance_at(m, 50.5) == periodic_disturbance(m, 50.5));
}

TEST_CASE("actuator saturation and deadzone") {
  ActuatorLimits<double> lim{0.5, 0.005};
  const Vector3 u = apply_actuator(Vector3(0.7, 0.003, 0.1), lim);
  CHECK(u(0) == 0.5);
  CHECK(u(1) == 0.0);
  CHECK(u(2) == 0.1);
  CHECK(apply_actuator(Vector3(-0.7, -0.003, -0.1), lim) == Vector3(-0.5, 0.0, -0.1));
}

TEST_CASE("inertia validation") {
  Matrix3 asym = Matrix3::Identity();
  asym(0, 1) = 0.1;
  CHECK_THROWS_AS(Inertia<double>{asym}, ValidationError);
  CHECK_THROWS_AS(Inertia<double>::diagonal(1, -1, 1), ValidationError);
}
