#include "sappc/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <variant>

namespace sappc {
namespace {

using PlantVector = Eigen::Matrix<double, 7, 1>;

PlantVector pack(const ErrorState<double>& s) {
  PlantVector x;
  x << s.q_e.w(), s.q_e.x(), s.q_e.y(), s.q_e.z(), s.omega_e;
  return x;
}

ErrorState<double> unpack(const PlantVector& x) {
  ErrorState<double> s;
  s.q_e = Quaternion(x(0), x(1), x(2), x(3));
  s.omega_e = x.tail<3>();
  return s;
}

bool inside(const TrajectoryRow& r, int i) { return std::abs(r.z_s(i) - 1.0) < r.delta(i); }

double positive_floor(double v, double floor) { return std::max(std::abs(v), floor); }

using AnySetup = std::variant<SappcSetup, TrappcSetup, BlfppcSetup>;

AnySetup make_setup(const ScenarioConfig& cfg, const std::array<RpfProfile, 3>& profiles, const Vector3& e0) {
  const Inertia<double> inertia(cfg.inertia);
  switch (cfg.sim.controller) {
    case ControllerKind::sappc: {
      SappcSetup s;
      s.ref = cfg.reference;
      s.inertia = inertia;
      s.profiles = profiles;
      s.constraint = cfg.constraint;
      s.shear = ShearParams::from_degrees(cfg.shear_deg);
      s.gains = cfg.gains;
      return s;
    }
    case ControllerKind::trappc: {
      TrappcSetup s;
      s.ref = cfg.reference;
      s.inertia = inertia;
      s.k_const = cfg.trappc.k_const;
      s.gains = cfg.gains;
      for (int i = 0; i < 3; ++i) {
        ExpPerformance& pf = s.performance[i];
        pf.rho_0 = cfg.trappc.rho_0.value_or(cfg.rpf.base.rho_e0);
        pf.rho_inf = cfg.trappc.rho_inf.value_or(cfg.rpf.base.rho_einf);
        pf.l = cfg.trappc.l.value_or(cfg.rpf.base.l);
        pf.sign = e0(i) < 0.0 ? -1 : 1;
      }
      return s;
    }
    case ControllerKind::blfppc: {
      BlfppcSetup s;
      s.ref = cfg.reference;
      s.inertia = inertia;
      s.blf = cfg.blf.gains;
      s.gains = cfg.gains;
      for (int i = 0; i < 3; ++i) {
        const double start = positive_floor(cfg.blf.rho_scale * e0(i), cfg.blf.rho_floor);
        s.bounds[i] = FtppfParams::make(start, cfg.blf.rho_tf, cfg.blf.t_f, cfg.blf.m);
        s.bounds[i].validate();
        s.sign[i] = e0(i) < 0.0 ? -1 : 1;
      }
      return s;
    }
  }
  throw ValidationError("controller", "unknown controller kind");
}

StepResult step_any(const AnySetup& setup, const ErrorState<double>& s, ControllerState& ctl, double t,
                    double dt) {
  return std::visit(
      [&](const auto& st) -> StepResult {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, SappcSetup>)
          return sappc_step(s, st, ctl, t, dt);
        else if constexpr (std::is_same_v<T, TrappcSetup>)
          return trappc_step(s, st, ctl, t, dt);
        else
          return blfppc_step(s, st, ctl, t, dt);
      },
      setup);
}

bool finite_row(const TrajectoryRow& r) {
  return r.q_ev.allFinite() && r.rho.allFinite() && r.delta.allFinite() && r.z_s.allFinite() &&
         r.eps_s.allFinite() && r.omega_e.allFinite() && r.u.allFinite() && std::isfinite(r.v1) &&
         std::isfinite(r.v2) && std::isfinite(r.v3);
}

}  // namespace

ErrorState<double> propagate_plant(const ErrorState<double>& s, const ReferenceTrajectory<double>& ref,
                                   const Inertia<double>& inertia, const DisturbanceModel<double>& dist,
                                   const Vector3& u, double t, double dt, std::ptrdiff_t last_valid_row) {
  auto f = [&](double tau, const PlantVector& x) -> PlantVector {
    const ErrorState<double> st = unpack(x);
    const ErrorRates<double> r = error_dynamics(st, ref, inertia, u, disturbance_at(dist, tau), tau);
    PlantVector dx;
    dx << r.q_e_dot, r.omega_e_dot;
    return dx;
  };
  const PlantVector next = rk4_step(f, pack(s), t, dt);
  if (!next.allFinite())
    throw NonFiniteState("plant state is not finite at t = " + std::to_string(t + dt), last_valid_row);
  ErrorState<double> out = unpack(next);
  out.q_e.normalize();
  return out;
}

std::array<RpfProfile, 3> scenario_profiles(const ScenarioConfig& cfg) {
  const Vector3 e0 = initial_error_state(cfg).q_e.vec();
  std::array<RpfProfile, 3> out;
  for (int i = 0; i < 3; ++i) {
    const RpfParams p = params_for_initial_error(cfg.rpf.base, e0(i), cfg.rpf.rho_from_error, cfg.rpf.rho_floor);
    out[i] = solve_profile(p, cfg.rpf.junction);
  }
  return out;
}

ErrorState<double> initial_error_state(const ScenarioConfig& cfg) {
  ErrorState<double> s;
  s.q_e = error_quaternion(cfg.q_s0.normalized(), cfg.reference.q_d0.normalized());
  s.omega_e = cfg.omega_s0 - rotation_matrix(s.q_e) * cfg.reference.omega_d(0.0);
  return s;
}

MetricOptions metric_options(const ScenarioConfig& cfg) {
  MetricOptions o;
  o.t2 = cfg.rpf.base.t2;
  o.crossing_band = cfg.constraint.b0;
  o.origin_reference = cfg.sim.controller == ControllerKind::trappc;
  return o;
}

RunResult run_scenario(const ScenarioConfig& cfg, bool keep_partial) {
  cfg.validate();
  RunResult res;
  const Inertia<double> inertia(cfg.inertia);
  ErrorState<double> s = initial_error_state(cfg);
  res.profiles = scenario_profiles(cfg);
  const AnySetup setup = make_setup(cfg, res.profiles, s.q_e.vec());

  const double dt = cfg.sim.dt;
  const long n = std::lround(cfg.sim.duration / dt);
  res.log.rows.reserve(static_cast<std::size_t>(n) + 1);
  ControllerState ctl;
  try {
    for (long k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) * dt;
      const StepResult step = step_any(setup, s, ctl, t, dt);
      TrajectoryRow row;
      row.t = t;
      row.q_ev = s.q_e.vec();
      for (int i = 0; i < 3; ++i) {
        row.rho(i) = step.tube[i].rho;
        row.delta(i) = step.tube[i].delta;
        row.z_s(i) = step.tube[i].z;
        row.eps_s(i) = step.tube[i].eps;
      }
      row.omega_e = s.omega_e;
      row.u = apply_actuator(step.u, cfg.actuator);
      row.d = disturbance_at(cfg.disturbance, t);
      row.v1 = ctl.v1;
      row.v2 = ctl.v2;
      row.v3 = ctl.v3;
      if (!finite_row(row) || !step.u.allFinite())
        throw NonFiniteState("controller output is not finite at t = " + std::to_string(t), k - 1);
      res.log.rows.push_back(row);
      if (k == n) break;
      s = propagate_plant(s, cfg.reference, inertia, cfg.disturbance, row.u, t, dt, k);
    }
  } catch (const DomainViolation& e) {
    if (!keep_partial) throw;
    res.abort_reason = e.what();
    return res;
  } catch (const NonFiniteState& e) {
    if (!keep_partial) throw;
    res.abort_reason = e.what();
    return res;
  }
  res.metrics = compute_metrics(res.log, metric_options(cfg));
  return res;
}

RunMetrics compute_metrics(const TrajectoryLog& log, const MetricOptions& opt) {
  const auto& rows = log.rows;
  if (rows.empty()) throw IncompleteLog("trajectory log is empty");
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (!(rows[k].t > rows[k - 1].t)) throw IncompleteLog("time column is not strictly increasing");
  const double t_end = rows.back().t;
  if (t_end + 1e-9 < opt.t2) throw IncompleteLog("log ends before t2");

  RunMetrics m;
  auto at_t2 = std::find_if(rows.begin(), rows.end(), [&](const TrajectoryRow& r) { return r.t >= opt.t2 - 1e-9; });
  m.settling_error = at_t2->q_ev.cwiseAbs().maxCoeff();
  m.rpf_deviation_at_t2 = (at_t2->q_ev - at_t2->rho).cwiseAbs().maxCoeff();

  const double window_start = t_end - opt.steady_window;
  const double recovery_start = t_end - opt.recovery_window;
  std::size_t post = 0, in = 0;
  bool recovered = true;
  std::vector<double> next_out(rows.size());
  for (int i = 0; i < 3; ++i) {
    // Time of the first outside sample at or after each row.
    double t_out = std::numeric_limits<double>::infinity();
    for (std::size_t k = rows.size(); k-- > 0;) {
      if (!inside(rows[k], i)) t_out = rows[k].t;
      next_out[k] = t_out;
    }
    bool captured = false;
    int state = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const TrajectoryRow& r = rows[k];
      if (r.t >= window_start - 1e-9) m.terminal_error = std::max(m.terminal_error, std::abs(r.q_ev(i)));
      const bool ok = inside(r, i);
      captured = captured || (ok && next_out[k] - r.t >= opt.capture_dwell - 1e-9);
      if (captured) {
        ++post;
        if (ok) ++in;
      }
      if (r.t >= recovery_start - 1e-9 && !ok) recovered = false;
      const double dev = r.q_ev(i) - (opt.origin_reference ? 0.0 : r.rho(i));
      if (dev > opt.crossing_band) {
        if (state < 0) ++m.reference_crossings;
        state = 1;
      } else if (dev < -opt.crossing_band) {
        if (state > 0) ++m.reference_crossings;
        state = -1;
      }
    }
    if (!captured) post += rows.size();
  }
  m.containment_fraction = post == 0 ? 0.0 : static_cast<double>(in) / static_cast<double>(post);
  m.recovered_after_pulse = recovered;
  return m;
}

std::vector<std::string> trajectory_columns() {
  std::vector<std::string> c{"t"};
  for (const char* base : {"q_ev", "rho", "delta", "z_s", "eps_s", "omega_e", "u", "d"})
    for (int i = 1; i <= 3; ++i) c.push_back(std::string(base) + std::to_string(i));
  c.insert(c.end(), {"V1", "V2", "V3"});
  return c;
}

std::vector<std::string> metrics_columns() {
  return {"settling_error", "terminal_error", "rpf_deviation_at_t2", "containment_fraction",
          "recovered_after_pulse", "reference_crossings"};
}

std::string schema_text() {
  std::ostringstream os;
  os << "trajectory CSV (header row, comma separated, 9 significant digits)\n";
  const char* notes[] = {
      "time [s]",
      "error quaternion vector part, axis 1..3",
      "tube centre line per axis (SAPPC: reference performance function)",
      "tube half-width relative to rho; inside when |z_s - 1| < delta",
      "normalized error q_ev / rho",
      "translated error fed to the first layer",
      "error angular velocity [rad/s]",
      "applied torque after saturation and deadzone [N m]",
      "external disturbance [N m]",
      "Lyapunov values of the two layers and the filter",
  };
  const auto cols = trajectory_columns();
  os << "  " << cols[0] << "  " << notes[0] << "\n";
  for (int g = 0; g < 8; ++g)
    os << "  " << cols[1 + 3 * g] << "," << cols[2 + 3 * g] << "," << cols[3 + 3 * g] << "  " << notes[1 + g] << "\n";
  os << "  V1,V2,V3  " << notes[9] << "\n";
  os << "\nmetrics CSV (one header row, one record per run)\n  ";
  const auto mc = metrics_columns();
  for (std::size_t i = 0; i < mc.size(); ++i) os << (i ? "," : "") << mc[i];
  os << "\n";
  return os.str();
}

void write_trajectory_csv(const TrajectoryLog& log, std::ostream& os) {
  const auto cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.9g", v);
    os << buf;
  };
  for (const TrajectoryRow& r : log.rows) {
    std::snprintf(buf, sizeof buf, "%.9g", r.t);
    os << buf;
    for (const Vector3* v : {&r.q_ev, &r.rho, &r.delta, &r.z_s, &r.eps_s, &r.omega_e, &r.u, &r.d})
      for (int i = 0; i < 3; ++i) put((*v)(i));
    put(r.v1);
    put(r.v2);
    put(r.v3);
    os << "\n";
  }
}

void write_trajectory_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_trajectory_csv(log, os);
}

void write_metrics_row(const RunMetrics& m, std::ostream& os) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%d,%d\n", m.settling_error, m.terminal_error,
                m.rpf_deviation_at_t2, m.containment_fraction, m.recovered_after_pulse ? 1 : 0,
                m.reference_crossings);
  os << buf;
}

// In w = exp(-a V^p) the nominal part of the flow is the constant a / T_c,
// so with theta = 0 the settling time is T_c (1 - w0) / a exactly.
OracleResult settling_time_oracle(double a, double p, double t_c, double theta, double mu, double v0) {
  OracleResult r;
  r.bound = theta > 0.0 ? t_c / (a * mu) : t_c / a;
  const double v_settle = 1e-12;
  auto to_v = [&](double w) { return std::pow(std::max(-std::log(w) / a, 0.0), 1.0 / p); };
  auto done = [&](double w) {
    const double v = to_v(w);
    if (theta > 0.0) return std::exp(a * std::pow(v, p)) * std::pow(v, 1.0 - p) <= p * t_c * theta / (1.0 - mu);
    return v <= v_settle;
  };
  auto rate = [&](double, double w) {
    const double v = to_v(w);
    if (theta == 0.0 || v <= 0.0) return a / t_c;
    return a / t_c - a * p * theta * w * std::pow(v, p - 1.0);
  };
  double w = std::exp(-a * std::pow(v0, p));
  double t = 0.0;
  if (v0 <= 0.0 || done(w)) {
    r.reached = true;
    r.within_bound = true;
    return r;
  }
  // With theta = 0 the rate in w is constant and the interpolation is exact;
  // otherwise the exit is the end of the step that reaches the set, which can
  // only make the measured time later.
  const double h = 1e-3 * t_c;
  const double t_max = 10.0 * r.bound;
  while (t < t_max) {
    double next = rk4_step(rate, w, t, h);
    next = std::min(next, 1.0);
    if (done(next)) {
      // Linear interpolation on the distance to the exit condition in w.
      const double w_exit = theta > 0.0 ? next : std::exp(-a * std::pow(v_settle, p));
      const double frac = theta > 0.0 || next == w ? 1.0 : std::clamp((w_exit - w) / (next - w), 0.0, 1.0);
      r.time = t + frac * h;
      r.reached = true;
      break;
    }
    w = next;
    t += h;
  }
  r.within_bound = r.reached && r.time <= r.bound;
  return r;
}

}  // namespace sappc
