#pragma once

// Backstepping attitude controllers on the error quaternion.
//
// SAPPC: virtual rate law on the sheared translated error, a predefined-time
// gain shape M(V) = exp(V^p) V^-p / (2 p T), a dynamic surface filter for the
// virtual law, and a tanh robust term for the bounded disturbance.
// TraPPC and BLFPPC are the two benchmark schemes; TraPPC shares the whole
// backstepping structure with a logarithmic transform, BLFPPC uses a
// barrier-type transform with a finite-time performance function.

#include <array>

#include "sappc/attitude.hpp"
#include "sappc/rpf.hpp"
#include "sappc/smetf.hpp"

namespace sappc {

struct SappcGains {
  double k_q = 1.0;
  double k_omega = 2.0;
  double p = 0.1;
  double t1_gain = 3.0;
  double t2_gain = 3.0;
  double t3_gain = 2.0;
  Vector3 mu = Vector3::Constant(0.1);
  double d_m = 0.06;
  double v_floor = 1e-12;

  void validate() const;
};

struct ControllerState {
  Vector3 s_d = Vector3::Zero();
  Vector3 alpha = Vector3::Zero();
  Vector3 z2 = Vector3::Zero();
  Vector3 h_d = Vector3::Zero();
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  bool initialized = false;
};

/// Per-axis view of the constraint tube in a common form: the axis is inside
/// when |z - 1| < delta, with rho the tube centre line.
struct AxisTube {
  double rho = 0.0;
  double delta = 0.0;
  double z = 0.0;
  double eps = 0.0;
};

struct StepResult {
  Vector3 u = Vector3::Zero();  // commanded torque, before the actuator model
  std::array<AxisTube, 3> tube{};
};

/// M = exp(v'^p) v'^-p / (2 p t_c), v' = max(v, floor).
double gain_matrix(double v, double p, double t_c, double floor);

/// Translated error, psi^-1 and eta of the first layer, per axis.
struct FirstLayer {
  Vector3 eps = Vector3::Zero();
  Vector3 psi = Vector3::Ones();
  Vector3 eta = Vector3::Zero();
};

FirstLayer first_layer(const std::array<AxisTransform, 3>& transforms);

/// alpha = Gamma^-1 [-psi^-1 M_q K_q eps - eta q_ev]; throws SingularJacobian.
Vector3 virtual_control(const Quaternion& q_e, const FirstLayer& layer, const SappcGains& gains);

/// u = -W0 + J S_d' - D_m tanh(z2/mu) - M_w K_w J z2, with z2 = omega_e - S_d taken from ctl.
Vector3 control_law(const ErrorState<double>& state, const ReferenceTrajectory<double>& ref,
                    const Inertia<double>& inertia, const ControllerState& ctl, const Vector3& s_d_dot,
                    const SappcGains& gains, double t);

/// S_d' = -M(V3) H_d with V3 = |H_d|^2 / 2 and time constant T3.
Vector3 dsc_filter_rate(const Vector3& h_d, const SappcGains& gains);

/// Lyapunov-shaped filter gain M(V3) used by dsc_filter_rate.
double dsc_filter_gain(const Vector3& h_d, const SappcGains& gains);

struct SappcSetup {
  ReferenceTrajectory<double> ref;
  Inertia<double> inertia = Inertia<double>::diagonal(1, 1, 1);
  std::array<RpfProfile, 3> profiles{};
  ConstraintParams constraint;
  ShearParams shear = ShearParams::from_degrees(10.0);
  SappcGains gains;
};

/// One control period: transforms, virtual law, filter, final law. Advances
/// the filter output S_d by dt and returns the held command.
StepResult sappc_step(const ErrorState<double>& plant, const SappcSetup& setup, ControllerState& ctl, double t,
                      double dt);

// --- TraPPC benchmark -------------------------------------------------------

/// eps = ln((K + z) / (K (1 - z))); throws DomainViolation outside (-K, 1).
double trappc_transform(double z_s, double k_const);
double trappc_transform_slope(double z_s, double k_const);

struct ExpPerformance {
  double rho_0 = 0.0;
  double rho_inf = 0.0;
  double l = 0.0;
  int sign = 1;

  RpfSample at(double t) const;
};

struct TrappcSetup {
  ReferenceTrajectory<double> ref;
  Inertia<double> inertia = Inertia<double>::diagonal(1, 1, 1);
  std::array<ExpPerformance, 3> performance{};
  double k_const = 0.3;
  SappcGains gains;
};

StepResult trappc_step(const ErrorState<double>& plant, const TrappcSetup& setup, ControllerState& ctl, double t,
                       double dt);

// --- BLFPPC benchmark -------------------------------------------------------

struct FtppfParams {
  double rho_0 = 0.0;
  double m = 0.5;
  double lambda = 0.0;
  double rho_tf = 0.0;
  double t_f = 0.0;

  /// Picks lambda so the function lands on rho_tf exactly at t_f.
  static FtppfParams make(double rho_start, double rho_tf, double t_f, double m);
  void validate() const;
};

RpfSample ftppf_at(const FtppfParams& params, double t);

struct BlfppcGains {
  double k1 = 1.0;
  double k2 = 1.0;
  double k3 = 0.01;
};

struct BlfppcSetup {
  ReferenceTrajectory<double> ref;
  Inertia<double> inertia = Inertia<double>::diagonal(1, 1, 1);
  std::array<FtppfParams, 3> bounds{};
  std::array<int, 3> sign{1, 1, 1};  // +1: (0, rho_u) tube, -1: (-rho_u, 0)
  BlfppcGains blf;
  SappcGains gains;  // filter, robust term and floor are shared with SAPPC
};

StepResult blfppc_step(const ErrorState<double>& plant, const BlfppcSetup& setup, ControllerState& ctl, double t,
                       double dt);

}  // namespace sappc
