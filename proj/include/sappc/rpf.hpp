#pragma once

// Reference performance function: an exponential decay that hands over to a
// quadratic at t1 and settles on the constant g_inf at t2.
//
//   rho(t) = (rho_e0 - rho_einf) exp(-l t) + rho_einf      0 <= t < t1
//          = a1 t^2 + a2 t + a3                             t1 <= t < t2
//          = g_inf                                          t2 <= t
//
// The constraint half-width delta(t) = B0 / |rho(t)| widens as rho shrinks.

namespace sappc {

struct RpfParams {
  double rho_e0 = 0.0;
  double rho_einf = 0.0;
  double l = 0.0;
  double t2 = 0.0;
  double g_inf = 0.0;
  int sign = 1;

  /// Throws ValidationError naming the violated rule.
  void validate() const;
};

/// How solve_profile treats parameter sets whose junction equation has no root.
enum class JunctionMode {
  smooth,     // C0 and C1 at both junctions or NoJunctionRoot
  automatic,  // smooth when possible, else the closest-approach junction (C0, slope kink at t1)
};

struct RpfProfile {
  RpfParams params;
  double t1 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
  bool smooth = true;
  double slope_jump = 0.0;  // rho_p'(t1) - rho_e'(t1), zero for smooth profiles
};

struct RpfSample {
  double value;
  double derivative;
};

struct ConstraintParams {
  double b0 = 0.0;
  void validate() const;
};

struct DeltaSample {
  double value;
  double rate;
};

/// Residual of the C0/C1 junction condition at a candidate t1 (unsigned profile).
double junction_residual(const RpfParams& p, double t1);

RpfProfile solve_profile(const RpfParams& params, JunctionMode mode = JunctionMode::smooth);

/// Signed value and time derivative.
RpfSample rho_at(const RpfProfile& profile, double t);

DeltaSample delta_at(const RpfProfile& profile, const ConstraintParams& c, double t);

/// Per-axis parameters following the initial error: sign from e0 and, when
/// requested, rho_e0 = |e0| floored at `floor` (a zero error takes the floor and a positive sign).
RpfParams params_for_initial_error(const RpfParams& base, double e0, bool rho_from_error, double floor);

}  // namespace sappc
