#include <cmath>
#include <initializer_list>

#include <doctest.h>

#include "sappc/errors.hpp"

#include "sappc/rpf.hpp"

using namespace sappc;

namespace {

RpfParams fast_decay_set() { return {0.4, 1e-6, 0.5, 20.0, 3e-5, 1}; }

// Smooth set: slow enough decay for the C1 junction equation to have a root.
RpfParams smooth_set() { return {0.25, 1e-6, 0.2, 15.0, 3e-5, 1}; }

}  // namespace

TEST_CASE("smooth profile lands on g_inf with zero slope") {
  const RpfProfile p = solve_profile(smooth_set());
  CHECK(p.smooth);
  CHECK(p.t1 > 0.0);
  CHECK(p.t1 < 15.0);
  CHECK(std::abs(rho_at(p, 15.0).value - 3e-5) < 1e-10);
  const double t2m = 15.0 - 1e-12;
  CHECK(std::abs((2.0 * p.a1 * t2m + p.a2)) < 1e-10);
  const double up = rho_at(p, p.t1 + 1e-9).value, dn = rho_at(p, p.t1 - 1e-9).value;
  CHECK(std::abs(up - dn) < 1e-8);
  const double sup = rho_at(p, p.t1 + 1e-9).derivative, sdn = rho_at(p, p.t1 - 1e-9).derivative;
  CHECK(std::abs(sup - sdn) < 1e-8);
}

TEST_CASE("profile endpoints") {
  for (int sign : {1, -1}) {
    RpfParams q = smooth_set();
    q.sign = sign;
    const RpfProfile p = solve_profile(q);
    CHECK(rho_at(p, 0.0).value == doctest::Approx(sign * 0.25).epsilon(1e-15));
    for (double t : {15.0, 20.0, 1e3}) {
      CHECK(rho_at(p, t).value == sign * 3e-5);
      CHECK(rho_at(p, t).derivative == 0.0);
    }
  }
}

TEST_CASE("fast decay has no smooth junction") {
  // Dense-grid oracle on a 1e-4 s grid: no sign change on (0, t2).
  const RpfParams q = fast_decay_set();
  bool sign_change = false;
  double best_t = 0.0, best_f = INFINITY;
  double prev = junction_residual(q, 1e-6);
  for (int k = 1; k < 200000; ++k) {
    const double t = k * 1e-4;
    const double f = junction_residual(q, t);
    sign_change = sign_change || ((f > 0.0) != (prev > 0.0));
    prev = f;
    if (f < best_f) best_f = f, best_t = t;
  }
  CHECK_FALSE(sign_change);
  CHECK(best_f > 0.0);
  CHECK_THROWS_AS(solve_profile(q, JunctionMode::smooth), NoJunctionRoot);

  // Automatic mode takes the closest approach, which the grid brackets.
  const RpfProfile p = solve_profile(q, JunctionMode::automatic);
  CHECK_FALSE(p.smooth);
  CHECK(std::abs(p.t1 - best_t) <= 1e-4);
  CHECK(std::abs(p.t1 - 18.0) < 1e-12);
  CHECK(std::abs(rho_at(p, p.t1 + 1e-9).value - rho_at(p, p.t1 - 1e-9).value) < 1e-8);
  CHECK(std::abs(rho_at(p, 20.0 - 1e-9).value - 3e-5) < 1e-10);
  CHECK(p.slope_jump != 0.0);
}

TEST_CASE("constraint half-width") {
  const RpfProfile p = solve_profile(smooth_set());
  const ConstraintParams c{1.5e-5};
  CHECK(delta_at(p, c, 0.0).value == doctest::Approx(1.5e-5 / 0.25).epsilon(1e-15));
  CHECK(delta_at(p, c, 15.0).value == 1.5e-5 / 3e-5);
  CHECK(delta_at(p, c, 40.0).rate == 0.0);
  for (double t = 0.0; t < 20.0; t += 0.01) {
    const double rho = std::abs(rho_at(p, t).value);
    CHECK(std::abs(delta_at(p, c, t).value * rho - c.b0) <= 1e-14 * c.b0 * 10);
    CHECK(delta_at(p, c, t).rate >= 0.0);
  }
}

TEST_CASE("delta rate matches a finite difference") {
  for (int sign : {1, -1}) {
    RpfParams q = smooth_set();
    q.sign = sign;
    const RpfProfile p = solve_profile(q);
    const ConstraintParams c{1.5e-5};
    for (double t : {1.0, 5.0, 12.0}) {
      const double h = 1e-6;
      const double fd = (delta_at(p, c, t + h).value - delta_at(p, c, t - h).value) / (2 * h);
      CHECK(delta_at(p, c, t).rate == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("parameter validation") {
  RpfParams q = fast_decay_set();
  q.rho_einf = 3e-5;
  CHECK_THROWS_AS(q.validate(), ValidationError);
  q = fast_decay_set();
  q.l = 0.0;
  CHECK_THROWS_AS(q.validate(), ValidationError);
  CHECK_THROWS_AS(ConstraintParams{0.0}.validate(), ValidationError);
}

TEST_CASE("per-axis parameters from the initial error") {
  const RpfParams base = fast_decay_set();
  CHECK(params_for_initial_error(base, -0.3, true, 0.05).sign == -1);
  CHECK(params_for_initial_error(base, -0.3, true, 0.05).rho_e0 == 0.3);
  CHECK(params_for_initial_error(base, 0.01, true, 0.05).rho_e0 == 0.05);
  CHECK(params_for_initial_error(base, 0.0, true, 0.05).sign == 1);
  CHECK(params_for_initial_error(base, -0.3, false, 0.05).rho_e0 == 0.4);
}
