#pragma once

// Fixed-step closed-loop simulation, run metrics and the scalar settling-time oracle.

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sappc/attitude.hpp"
#include "sappc/errors.hpp"
#include "sappc/rpf.hpp"
#include "sappc/scenario.hpp"

namespace sappc {

struct TrajectoryRow {
  double t = 0.0;
  Vector3 q_ev, rho, delta, z_s, eps_s, omega_e, u, d;
  double v1 = 0.0, v2 = 0.0, v3 = 0.0;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
};

struct RunMetrics {
  double settling_error = 0.0;       // max_i |q_evi| at t2
  double terminal_error = 0.0;       // max over the steady window of max_i |q_evi|
  double rpf_deviation_at_t2 = 0.0;  // max_i |q_evi - rho_i| at t2
  double containment_fraction = 0.0;
  bool recovered_after_pulse = false;
  int reference_crossings = 0;  // sign changes of q_evi - reference beyond the crossing band
};

struct MetricOptions {
  double t2 = 20.0;
  double steady_window = 25.0;
  double recovery_window = 10.0;
  double capture_dwell = 1.0;  // entry counts as capture after this long inside
  double crossing_band = 0.0;
  bool origin_reference = false;  // measure crossings against 0 instead of the rho column
};

struct RunResult {
  TrajectoryLog log;
  RunMetrics metrics;
  std::array<RpfProfile, 3> profiles{};
  std::string abort_reason;  // set only when a kept-partial run stopped early
};

/// Classical fourth-order Runge-Kutta step for x' = f(t, x).
template <typename State, typename F>
State rk4_step(F&& f, const State& x, double t, double dt) {
  const State k1 = f(t, x);
  const State k2 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(x + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(x + dt * k3));
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One plant step with u held and d(t) evaluated at the stages; renormalizes q_e.
/// Throws NonFiniteState tagged with last_valid_row.
ErrorState<double> propagate_plant(const ErrorState<double>& s, const ReferenceTrajectory<double>& ref,
                                   const Inertia<double>& inertia, const DisturbanceModel<double>& dist,
                                   const Vector3& u, double t, double dt, std::ptrdiff_t last_valid_row);

/// Per-axis reference profiles for the scenario's initial error.
std::array<RpfProfile, 3> scenario_profiles(const ScenarioConfig& cfg);

/// Initial error state from q_s(0), omega_s(0) and the reference.
ErrorState<double> initial_error_state(const ScenarioConfig& cfg);

/// Runs cfg.sim.controller over the scenario; every step is logged. With
/// keep_partial, a DomainViolation or NonFiniteState ends the run instead of
/// propagating: the log holds the rows up to the failure, abort_reason the
/// message, and metrics are left at their defaults.
RunResult run_scenario(const ScenarioConfig& cfg, bool keep_partial = false);

MetricOptions metric_options(const ScenarioConfig& cfg);
RunMetrics compute_metrics(const TrajectoryLog& log, const MetricOptions& opt);

std::vector<std::string> trajectory_columns();
std::vector<std::string> metrics_columns();
std::string schema_text();
void write_trajectory_csv(const TrajectoryLog& log, std::ostream& os);
void write_trajectory_csv(const TrajectoryLog& log, const std::string& path);
void write_metrics_row(const RunMetrics& m, std::ostream& os);

// --- settling-time oracle ---------------------------------------------------

struct OracleResult {
  double time = 0.0;   // settling time (theta = 0) or residual-set entry time
  double bound = 0.0;  // T_c / a or T_c / (a mu)
  bool reached = false;
  bool within_bound = false;
};

/// Integrates V' = -(1/(p T_c)) e^{a V^p} V^{1-p} + theta from v0.
OracleResult settling_time_oracle(double a, double p, double t_c, double theta, double mu, double v0);

/// |x| - x tanh(x / mu): the robust term's worst-case residual.
inline double tanh_gap(double x, double mu) { return std::abs(x) - x * std::tanh(x / mu); }

}  // namespace sappc
