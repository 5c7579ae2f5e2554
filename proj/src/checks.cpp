#include "sappc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

#include "sappc/attitude.hpp"
#include "sappc/rpf.hpp"
#include "sappc/sim.hpp"
#include "sappc/smetf.hpp"

namespace sappc {
namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel_err(double num, double ana, double floor) {
  return std::abs(num - ana) / std::max({std::abs(ana), std::abs(num), floor});
}

Quaternion random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector4 v(n(rng), n(rng), n(rng), n(rng));
  return Quaternion(v(0), v(1), v(2), v(3)).normalized();
}

// Log-spaced magnitudes with both signs, plus zero and the tube centre.
std::vector<double> signed_log_grid(double lo, double hi, int per_decade) {
  std::vector<double> g{0.0, 1.0};
  const int n = static_cast<int>(std::round(std::log10(hi / lo) * per_decade));
  for (int k = 0; k <= n; ++k) {
    const double m = lo * std::pow(10.0, static_cast<double>(k) / per_decade);
    g.push_back(m);
    g.push_back(-m);
    g.push_back(1.0 + m);
    g.push_back(1.0 - m);
  }
  return g;
}

// A smooth profile from the random family used by the rpf suite.
RpfParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RpfParams p;
  p.rho_e0 = 0.05 + 0.95 * u(rng);
  p.rho_einf = std::pow(10.0, -7.0 + 2.0 * u(rng));
  p.g_inf = p.rho_einf * (2.0 + 98.0 * u(rng));
  p.l = 0.1 + 0.9 * u(rng);
  p.t2 = 5.0 + 35.0 * u(rng);
  p.sign = u(rng) < 0.5 ? -1 : 1;
  return p;
}

}  // namespace

CheckResult check_tanh_gap() {
  CheckResult r{"tanh robust-term gap", true, ""};
  double worst = 0.0;
  for (double mu : {0.1, 1.0, 10.0}) {
    for (int k = -100000; k <= 100000; ++k) {
      const double x = k * 1e-3;
      const double g = tanh_gap(x, mu);
      worst = std::max(worst, g / mu);
      if (g < 0.0 || g > 0.2785 * mu) {
        r.passed = false;
        r.detail = fmt("gap %.6g at x = %.6g, mu = %.3g", g, x, mu);
        return r;
      }
    }
  }
  r.detail = fmt("max gap / mu = %.6f (bound 0.2785)", worst);
  return r;
}

CheckResult check_settling_oracle() {
  CheckResult r{"settling-time oracle", true, ""};
  int cases = 0;
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0})
    for (double p : {0.1, 0.5, 0.9})
      for (double t_c : {1.0, 2.0, 5.0})
        for (double v0 : {0.0, 0.1, 1.0, 100.0})
          for (double theta : {0.0, 0.01, 0.1, 1.0})
            for (double mu : {0.1, 0.5, 0.9}) {
              if (theta == 0.0 && mu != 0.5) continue;
              const OracleResult o = settling_time_oracle(a, p, t_c, theta, mu, v0);
              ++cases;
              if (!o.within_bound) {
                r.passed = false;
                r.detail = fmt("a = %.3g, p = %.3g, T_c = %.3g", a, p, t_c) +
                           fmt(", V0 = %.3g, theta = %.3g, mu = %.3g", v0, theta, mu) +
                           fmt(": time %.9g vs bound %.9g", o.time, o.bound);
                return r;
              }
              worst = std::max(worst, o.time / o.bound);
            }
  r.detail = std::to_string(cases) + " cases, max time / bound = " + fmt("%.12f", worst);
  return r;
}

CheckResult check_rpf_profiles(std::uint64_t seed, int n_sets) {
  CheckResult r{"rpf junctions", true, ""};
  std::mt19937_64 rng(seed);
  int smooth = 0, drawn = 0;
  double worst_c0 = 0.0, worst_c1 = 0.0;
  auto fail = [&](const std::string& what) {
    r.passed = false;
    r.detail = "set " + std::to_string(drawn) + ": " + what;
    return r;
  };
  while (smooth < n_sets) {
    const RpfParams p = random_params(rng);
    ++drawn;
    if (drawn > 50 * n_sets) return fail("too few solvable sets");
    RpfProfile prof;
    try {
      prof = solve_profile(p, JunctionMode::smooth);
    } catch (const NoJunctionRoot&) {
      continue;
    }
    ++smooth;
    const double h = 1e-9;
    const RpfSample lo = rho_at(prof, prof.t1 - h), hi = rho_at(prof, prof.t1 + h);
    const RpfSample at2 = rho_at(prof, p.t2 - h), after = rho_at(prof, p.t2 + h);
    const double c0 = std::max(std::abs(lo.value - hi.value), std::abs(at2.value - after.value));
    const double c1 = std::max(std::abs(lo.derivative - hi.derivative), std::abs(at2.derivative));
    worst_c0 = std::max(worst_c0, c0);
    worst_c1 = std::max(worst_c1, c1);
    if (!(prof.t1 > 0.0 && prof.t1 < p.t2)) return fail("t1 outside (0, t2)");
    if (c0 > 1e-8) return fail(fmt("value jump %.3g", c0));
    if (c1 > 1e-8) return fail(fmt("slope jump %.3g", c1));

    const ConstraintParams cons{0.5 * p.g_inf};
    double prev_rho = std::abs(rho_at(prof, 0.0).value), prev_delta = 0.0;
    for (double t = 0.0; t <= p.t2 + 5.0; t += 1e-3) {
      const RpfSample s = rho_at(prof, t);
      const DeltaSample d = delta_at(prof, cons, t);
      if (std::abs(s.value) > prev_rho * (1.0 + 1e-12)) return fail(fmt("|rho| increases at t = %.4f", t));
      if (d.value < prev_delta * (1.0 - 1e-12)) return fail(fmt("delta decreases at t = %.4f", t));
      if (std::abs(d.value * std::abs(s.value) - cons.b0) > 1e-14 * std::max(1.0, cons.b0 * 1e6))
        return fail(fmt("delta |rho| != b0 at t = %.4f", t));
      if (s.value * p.sign < 0.0 || s.derivative * p.sign > 1e-15) return fail(fmt("sign rule at t = %.4f", t));
      prev_rho = std::abs(s.value);
      prev_delta = d.value;
    }
  }
  r.detail = std::to_string(smooth) + " smooth sets (" + std::to_string(drawn) + " drawn), max value jump " +
             fmt("%.3g, max slope jump %.3g", worst_c0, worst_c1);
  return r;
}

CheckResult check_smetf_global() {
  CheckResult r{"smetf global solvability", true, ""};
  const std::vector<double> grid = [] {
    auto g = signed_log_grid(1e-6, 1e6, 8);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  }();
  int solved = 0;
  for (double theta : {1.0, 10.0, 45.0}) {
    const ShearParams sh = ShearParams::from_degrees(theta);
    for (double delta : {1e-4, 1e-2, 1.0, 10.0}) {
      double prev = -std::numeric_limits<double>::infinity();
      for (double z_s : grid) {
        AxisTransform a;
        try {
          a = transform_axis(z_s, 1.0, 0.0, delta, 0.0, sh);
        } catch (const Error& e) {
          r.passed = false;
          r.detail = fmt("z_s = %.6g, delta = %.3g, theta = %.3g: ", z_s, delta, theta) + e.what();
          return r;
        }
        ++solved;
        const double resid = std::abs(a.z_0 + a.eps_s * sh.tan_theta - z_s);
        const bool inside = a.z_0 > 1.0 - delta && a.z_0 < 1.0 + delta;
        const bool sign_ok = (z_s > 1.0 && a.eps_s > 0.0) || (z_s < 1.0 && a.eps_s < 0.0) || (z_s == 1.0 && a.eps_s == 0.0);
        std::string bad;
        if (resid > 1e-10 * std::max(1.0, std::abs(z_s))) bad = fmt("shear residual %.3g", resid);
        if (!inside) bad = "pre-image off the branch";
        if (!sign_ok) bad = "sign(eps) != sign(z_s - 1)";
        if (!(a.eps_s > prev)) bad = "eps not increasing";
        if (!bad.empty()) {
          r.passed = false;
          r.detail = fmt("z_s = %.6g, delta = %.3g, theta = %.3g: ", z_s, delta, theta) + bad;
          return r;
        }
        prev = a.eps_s;
      }
    }
  }
  r.detail = std::to_string(solved) + " grid points solved";
  return r;
}

CheckResult check_smetf_squeeze(std::uint64_t seed) {
  CheckResult r{"smetf horizontal squeeze", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  double worst = 0.0;
  for (double theta : {1.0, 10.0, 45.0}) {
    const ShearParams sh = ShearParams::from_degrees(theta);
    for (double delta : {1e-2, 1.0, 10.0}) {
      for (int k = 0; k < 300; ++k) {
        const double z0 = 1.0 + delta * u(rng);
        const double eps0 = base_transform(z0, delta);
        const AxisTransform a = transform_axis(z0 + eps0 * sh.tan_theta, 1.0, 0.0, delta, 0.0, sh);
        const double e = rel_err(a.eps_s, eps0, 1e-12);
        worst = std::max(worst, e);
        if (e > 1e-8) {
          r.passed = false;
          r.detail = fmt("z0 = %.9g, delta = %.3g: eps %.9g vs %.9g", z0, delta, a.eps_s) + fmt(" / %.9g", eps0);
          return r;
        }
      }
    }
  }
  r.detail = fmt("max relative mismatch %.3g", worst);
  return r;
}

CheckResult check_smetf_sensitivity() {
  CheckResult r{"smetf sensitivities", true, ""};
  const ShearParams sh = ShearParams::from_degrees(10.0);
  double worst_ps = 0.0;
  for (double delta : {1e-2, 0.1, 1.0, 10.0}) {
    for (double z_s = -5.0; z_s <= 5.0; z_s += 0.01) {
      const double h = 1e-6;
      const double num = (transform_axis(z_s + h, 1.0, 0.0, delta, 0.0, sh).eps_s -
                          transform_axis(z_s - h, 1.0, 0.0, delta, 0.0, sh).eps_s) /
                         (2.0 * h);
      const double e = rel_err(num, transform_axis(z_s, 1.0, 0.0, delta, 0.0, sh).p_s, 1e-12);
      worst_ps = std::max(worst_ps, e);
      if (e > 1e-4) {
        r.passed = false;
        r.detail = fmt("d eps / d z_s off by %.3g at z_s = %.4f, delta = %.3g", e, z_s, delta);
        return r;
      }
    }
  }

  // Synthetic trajectory: error oscillating through the tube against a decaying profile.
  RpfParams p;
  p.rho_e0 = 0.4;
  p.rho_einf = 1e-6;
  p.l = 0.3;
  p.t2 = 20.0;
  p.g_inf = 3e-5;
  const RpfProfile prof = solve_profile(p, JunctionMode::automatic);
  const ConstraintParams cons{0.01};
  auto eps_at = [&](double t, AxisTransform* out) {
    const RpfSample s = rho_at(prof, t);
    const DeltaSample d = delta_at(prof, cons, t);
    const double z = 1.0 + 0.8 * std::sin(0.9 * t) + 0.05 * std::cos(3.1 * t);
    const double e = z * s.value;
    const double e_dot = (0.72 * std::cos(0.9 * t) - 0.155 * std::sin(3.1 * t)) * s.value + z * s.derivative;
    const AxisTransform a = transform_axis(e, s.value, s.derivative, d.value, d.rate, sh);
    if (out) *out = a;
    return std::pair{a.eps_s, a.psi * (e_dot + a.eta * e) + a.xi};
  };
  double worst_chain = 0.0;
  for (double t = 0.25; t < p.t2 + 5.0; t += 0.05) {
    if (std::abs(t - prof.t1) < 0.01 || std::abs(t - p.t2) < 0.01) continue;
    const double h = 1e-6;
    const double num = (eps_at(t + h, nullptr).first - eps_at(t - h, nullptr).first) / (2.0 * h);
    const double ana = eps_at(t, nullptr).second;
    const double e = rel_err(num, ana, 1e-6);
    worst_chain = std::max(worst_chain, e);
    if (e > 1e-3) {
      r.passed = false;
      r.detail = fmt("d eps / dt off by %.3g at t = %.3f (fd %.6g)", e, t, num) + fmt(" vs %.6g", ana);
      return r;
    }
  }
  r.detail = fmt("max rel err: d eps / d z_s %.3g, d eps / dt %.3g", worst_ps, worst_chain);
  return r;
}

CheckResult check_sign_gate(std::uint64_t seed) {
  CheckResult r{"eps * xi sign gate", true, ""};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int n = 0;
  for (double theta : {1.0, 10.0, 45.0}) {
    const ShearParams sh = ShearParams::from_degrees(theta);
    for (int k = 0; k < 2000; ++k) {
      const double delta = std::pow(10.0, -3.0 + 4.0 * u(rng));
      const double delta_dot = k % 10 == 0 ? 0.0 : std::pow(10.0, -4.0 + 4.0 * u(rng));
      const double z_s = 1.0 + (u(rng) - 0.5) * std::pow(10.0, -4.0 + 8.0 * u(rng));
      const AxisTransform a = transform_axis(z_s, 1.0, 0.0, delta, delta_dot, sh);
      ++n;
      if (a.eps_s * a.xi > 0.0) {
        r.passed = false;
        r.detail = fmt("z_s = %.9g, delta = %.3g, delta_dot = %.3g", z_s, delta, delta_dot);
        return r;
      }
    }
  }
  r.detail = std::to_string(n) + " samples";
  return r;
}

CheckResult check_attitude_algebra(std::uint64_t seed) {
  CheckResult r{"attitude algebra", true, ""};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  double worst_orth = 0.0, worst_det = 0.0, worst_kin = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Quaternion q = random_unit(rng);
    const Matrix3 c = rotation_matrix(q);
    worst_orth = std::max({worst_orth, (c * c.transpose() - Matrix3::Identity()).cwiseAbs().maxCoeff(),
                           std::abs(c.determinant() - 1.0)});
    worst_det = std::max(worst_det, std::abs((2.0 * jacobian(q)).determinant() - q.w()));
    const Vector3 w(n(rng), n(rng), n(rng));
    const Vector4 rate = quaternion_rate(q, w);
    worst_kin = std::max(worst_kin, std::abs(q.w() * rate(0) + q.vec().dot(rate.tail<3>())));
  }
  r.passed = worst_orth <= 1e-10 && worst_det <= 1e-12 && worst_kin <= 1e-12;
  r.detail = fmt("orthonormality %.3g, det(2 Gamma) - q0 %.3g, norm rate %.3g", worst_orth, worst_det, worst_kin);
  return r;
}

CheckResult check_free_rotation() {
  CheckResult r{"free rotation invariants", true, ""};
  const Inertia<double> inertia = Inertia<double>::diagonal(3.0, 4.0, 5.0);
  const ReferenceTrajectory<double> ref;  // zero amplitude: omega_e is the body rate
  const DisturbanceModel<double> quiet;
  ErrorState<double> s;
  s.q_e = Quaternion(0.9, 0.1, -0.3, 0.2).normalized();
  s.omega_e = Vector3(0.3, -0.2, 0.5);
  auto energy = [&](const Vector3& w) { return 0.5 * w.dot(inertia.J * w); };
  const double e0 = energy(s.omega_e);
  const double h0 = (inertia.J * s.omega_e).norm();
  const double dt = 0.01;
  double drift = 0.0;
  for (int k = 0; k < 10000; ++k) {
    // Unnormalized quaternion step with the rate frozen, to bound the drift the
    // renormalization removes.
    using V4 = Eigen::Matrix<double, 4, 1>;
    auto f = [&](double, const V4& x) { return quaternion_rate(Quaternion(x(0), x(1), x(2), x(3)), s.omega_e); };
    const V4 raw = rk4_step(f, V4(s.q_e.w(), s.q_e.x(), s.q_e.y(), s.q_e.z()), 0.0, dt);
    drift = std::max(drift, std::abs(raw.norm() - 1.0));
    s = propagate_plant(s, ref, inertia, quiet, Vector3::Zero(), k * dt, dt, k);
  }
  const double de = std::abs(energy(s.omega_e) - e0) / e0;
  const double dh = std::abs((inertia.J * s.omega_e).norm() - h0) / h0;
  const double norm = std::abs(s.q_e.norm() - 1.0);
  r.passed = de <= 1e-6 && dh <= 1e-6 && drift <= 1e-6 && norm <= 1e-9;
  r.detail = fmt("energy %.3g, momentum %.3g, per-step norm drift %.3g", de, dh, drift);
  return r;
}

CheckResult check_disturbance_bound(const ScenarioConfig& cfg) {
  CheckResult r{"disturbance bound", true, ""};
  const auto& m = cfg.disturbance;
  const double period = m.omega_p > 0.0 ? 2.0 * std::numbers::pi / m.omega_p : 1.0;
  double worst = 0.0;
  for (double t = 0.0; t <= period; t += period * 1e-5) worst = std::max(worst, periodic_disturbance(m, t).norm());
  r.passed = worst <= cfg.gains.d_m;
  r.detail = fmt("max |d| = %.6g N m over %.4g s, bound %.6g", worst, period, cfg.gains.d_m);
  return r;
}

CheckResult check_determinism(const ScenarioConfig& cfg) {
  CheckResult r{"determinism", true, ""};
  const RunResult a = run_scenario(cfg, true);
  const RunResult b = run_scenario(cfg, true);
  auto same = [](const Vector3& x, const Vector3& y) { return std::memcmp(x.data(), y.data(), 3 * sizeof(double)) == 0; };
  bool eq = a.log.rows.size() == b.log.rows.size() && a.abort_reason == b.abort_reason;
  for (std::size_t k = 0; eq && k < a.log.rows.size(); ++k) {
    const TrajectoryRow &x = a.log.rows[k], &y = b.log.rows[k];
    eq = std::memcmp(&x.t, &y.t, sizeof(double)) == 0 && same(x.q_ev, y.q_ev) && same(x.rho, y.rho) &&
         same(x.delta, y.delta) && same(x.z_s, y.z_s) && same(x.eps_s, y.eps_s) && same(x.omega_e, y.omega_e) &&
         same(x.u, y.u) && same(x.d, y.d) && std::memcmp(&x.v1, &y.v1, sizeof(double)) == 0 &&
         std::memcmp(&x.v2, &y.v2, sizeof(double)) == 0 && std::memcmp(&x.v3, &y.v3, sizeof(double)) == 0;
    if (!eq) r.detail = "first difference at row " + std::to_string(k);
  }
  r.passed = eq;
  if (eq) r.detail = std::to_string(a.log.rows.size()) + " rows identical";
  return r;
}

std::vector<CheckResult> run_all_checks(const ScenarioConfig* cfg, std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto guarded = [&](const char* name, auto&& f) {
    try {
      out.push_back(f());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("tanh robust-term gap", [] { return check_tanh_gap(); });
  guarded("settling-time oracle", [] { return check_settling_oracle(); });
  guarded("rpf junctions", [&] { return check_rpf_profiles(seed); });
  guarded("smetf global solvability", [] { return check_smetf_global(); });
  guarded("smetf horizontal squeeze", [&] { return check_smetf_squeeze(seed); });
  guarded("smetf sensitivities", [] { return check_smetf_sensitivity(); });
  guarded("eps * xi sign gate", [&] { return check_sign_gate(seed); });
  guarded("attitude algebra", [&] { return check_attitude_algebra(seed); });
  guarded("free rotation invariants", [] { return check_free_rotation(); });
  if (cfg) {
    guarded("disturbance bound", [&] { return check_disturbance_bound(*cfg); });
    guarded("determinism", [&] { return check_determinism(*cfg); });
  }
  return out;
}

}  // namespace sappc
