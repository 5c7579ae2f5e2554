#include <cmath>
#include <initializer_list>
#include <numbers>

#include <doctest.h>

#include "sappc/errors.hpp"

#include "sappc/smetf.hpp"

using namespace sappc;
using std::numbers::pi;

namespace {

// Plain bisection on the sheared equation over the open strip.
double bisect_z0(double z_s, double delta, double tan_theta) {
  double lo = 1.0 - delta + 1e-12, hi = 1.0 + delta - 1e-12;
  auto g = [&](double z0) { return z0 + std::tan(pi / (2 * delta) * (z0 - 1.0)) * tan_theta - z_s; };
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("base transform") {
  CHECK(base_transform(1.0, 0.3) == 0.0);
  CHECK(base_transform(1.5, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(base_transform(1.0 + 0.3 - 1e-12, 0.3) > 1e10);
  CHECK_THROWS_AS(base_transform(1.3, 0.3), BranchViolation);
  CHECK_THROWS_AS(base_transform(0.5, 0.3), BranchViolation);
}

TEST_CASE("pre-image solve") {
  const ShearParams s10 = ShearParams::from_degrees(10.0);
  CHECK(solve_z0(1.0, 0.5, s10) == 1.0);

  const double z0 = solve_z0(5.0, 1.0, s10);
  CHECK(std::abs(z0 - bisect_z0(5.0, 1.0, s10.tan_theta)) < 1e-12);
  CHECK(std::abs(z0 + base_transform(z0, 1.0) * s10.tan_theta - 5.0) < 1e-10);

  // A tiny shear leaves points inside the strip nearly in place.
  const ShearParams flat(1e-9);
  CHECK(std::abs(solve_z0(1.2, 0.5, flat) - 1.2) < 1e-8);
}

TEST_CASE("transform at the centre line") {
  const ShearParams s = ShearParams::from_degrees(10.0);
  const double delta = 0.4;
  const AxisTransform a = transform_axis(0.2, 0.2, -0.01, delta, 0.05, s);
  CHECK(a.z_s == 1.0);
  CHECK(a.eps_s == 0.0);
  CHECK(a.xi == 0.0);
  CHECK(a.p_s == doctest::Approx(pi / (pi * s.tan_theta + 2 * delta)).epsilon(1e-12));
  CHECK(a.psi == doctest::Approx(a.p_s / 0.2).epsilon(1e-14));
  CHECK(a.eta == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("sign of the tube-rate term") {
  const ShearParams s = ShearParams::from_degrees(10.0);
  const AxisTransform above = transform_axis(0.25, 0.2, -0.01, 0.4, 0.05, s);
  CHECK(above.z_0 > 1.0);
  CHECK(above.eps_s > 0.0);
  CHECK(above.xi < 0.0);
  const AxisTransform below = transform_axis(0.15, 0.2, -0.01, 0.4, 0.05, s);
  CHECK(below.eps_s < 0.0);
  CHECK(below.xi > 0.0);
}

TEST_CASE("far outside the tube stays finite") {
  const ShearParams s = ShearParams::from_degrees(10.0);
  const AxisTransform a = transform_axis(1e6, 1e-3, 0.0, 0.01, 0.0, s);
  CHECK(std::isfinite(a.eps_s));
  CHECK(a.p_s == doctest::Approx(1.0 / s.tan_theta).epsilon(1e-3));
  const AxisTransform b = transform_axis(-1e6, 1e-3, 0.0, 0.01, 0.0, s);
  CHECK(b.eps_s < 0.0);
  CHECK(std::isfinite(b.p_s));
}

TEST_CASE("shear points") {
  const ShearParams s10 = ShearParams::from_degrees(10.0);
  const auto [x, y] = shear_points(0.7, 0.0, s10);
  CHECK(x == 0.7);
  CHECK(y == 0.0);
  const auto [x45, y45] = shear_points(0.0, 1.0, ShearParams::from_degrees(45.0));
  CHECK(x45 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(y45 == 1.0);
  // Shearing back by -theta: x1 - y tan(theta).
  const auto [x1, y1] = shear_points(0.3, -2.0, s10);
  CHECK(std::abs(x1 - y1 * s10.tan_theta - 0.3) < 1e-14);
}

TEST_CASE("shear angle validation") {
  CHECK_THROWS_AS(ShearParams::from_degrees(0.0), ValidationError);
  CHECK_THROWS_AS(ShearParams::from_degrees(90.0), ValidationError);
}
