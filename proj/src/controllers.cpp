#include "sappc/controllers.hpp"

#include <cmath>
#include <string>

#include "sappc/errors.hpp"

namespace sappc {
namespace {

Vector3 tanh_term(const Vector3& z2, const Vector3& mu) {
  Vector3 r;
  for (int i = 0; i < 3; ++i) r(i) = std::tanh(z2(i) / mu(i));
  return r;
}

// Filter output advanced over one hold period with the gain frozen; the
// exponential form stays stable however large the gain gets.
void advance_filter(ControllerState& ctl, double gain, double dt) {
  ctl.s_d = ctl.alpha + ctl.h_d * std::exp(-gain * dt);
}

// Shared tail of SAPPC and TraPPC: filter, second layer, bookkeeping.
Vector3 backstep_tail(const ErrorState<double>& plant, const ReferenceTrajectory<double>& ref,
                      const Inertia<double>& inertia, const SappcGains& gains, ControllerState& ctl,
                      const Vector3& alpha, double t, double dt) {
  ctl.alpha = alpha;
  if (!ctl.initialized) {
    ctl.s_d = alpha;
    ctl.initialized = true;
  }
  ctl.h_d = ctl.s_d - alpha;
  const double g3 = dsc_filter_gain(ctl.h_d, gains);
  const Vector3 s_d_dot = -g3 * ctl.h_d;
  ctl.z2 = plant.omega_e - ctl.s_d;
  const Vector3 u = control_law(plant, ref, inertia, ctl, s_d_dot, gains, t);
  ctl.v2 = 0.5 * ctl.z2.dot(inertia.J * ctl.z2);
  ctl.v3 = 0.5 * ctl.h_d.squaredNorm();
  advance_filter(ctl, g3, dt);
  return u;
}

}  // namespace

void SappcGains::validate() const {
  if (!(k_q > 0.0)) throw ValidationError("k_q", "must be > 0");
  if (!(k_omega > 0.0)) throw ValidationError("k_omega", "must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p", "must lie in (0, 1)");
  if (!(t1_gain > 0.0)) throw ValidationError("t1_gain", "must be > 0");
  if (!(t2_gain > 0.0)) throw ValidationError("t2_gain", "must be > 0");
  if (!(t3_gain > 0.0)) throw ValidationError("t3_gain", "must be > 0");
  if (!(p * t3_gain < 1.0)) throw ValidationError("t3_gain", "p * T3 must be < 1");
  if (!(mu.array() > 0.0).all()) throw ValidationError("mu", "every component must be > 0");
  if (!(d_m >= 0.0)) throw ValidationError("d_m", "must be >= 0");
  if (!(v_floor > 0.0)) throw ValidationError("v_floor", "must be > 0");
}

double gain_matrix(double v, double p, double t_c, double floor) {
  const double vf = std::max(v, floor);
  const double vp = std::pow(vf, p);
  return std::exp(vp) / (vp * 2.0 * p * t_c);
}

FirstLayer first_layer(const std::array<AxisTransform, 3>& transforms) {
  FirstLayer f;
  for (int i = 0; i < 3; ++i) {
    f.eps(i) = transforms[i].eps_s;
    f.psi(i) = transforms[i].psi;
    f.eta(i) = transforms[i].eta;
  }
  return f;
}

Vector3 virtual_control(const Quaternion& q_e, const FirstLayer& layer, const SappcGains& gains) {
  const double v1 = 0.5 * layer.eps.squaredNorm();
  const double m_q = gain_matrix(v1, gains.p, gains.t1_gain, gains.v_floor);
  const Vector3 inner = -(m_q * gains.k_q) * layer.eps.cwiseQuotient(layer.psi) -
                        layer.eta.cwiseProduct(q_e.vec());
  return jacobian_inverse(q_e) * inner;
}

Vector3 control_law(const ErrorState<double>& state, const ReferenceTrajectory<double>& ref,
                    const Inertia<double>& inertia, const ControllerState& ctl, const Vector3& s_d_dot,
                    const SappcGains& gains, double t) {
  const Vector3& z2 = ctl.z2;
  const double v2 = 0.5 * z2.dot(inertia.J * z2);
  const double m_w = gain_matrix(v2, gains.p, gains.t2_gain, gains.v_floor);
  return -dynamics_feedforward(state, ref, inertia, t) + inertia.J * s_d_dot -
         gains.d_m * tanh_term(z2, gains.mu) - (m_w * gains.k_omega) * (inertia.J * z2);
}

double dsc_filter_gain(const Vector3& h_d, const SappcGains& gains) {
  return gain_matrix(0.5 * h_d.squaredNorm(), gains.p, gains.t3_gain, gains.v_floor);
}

Vector3 dsc_filter_rate(const Vector3& h_d, const SappcGains& gains) { return -dsc_filter_gain(h_d, gains) * h_d; }

StepResult sappc_step(const ErrorState<double>& plant, const SappcSetup& setup, ControllerState& ctl, double t,
                      double dt) {
  StepResult out;
  std::array<AxisTransform, 3> tr;
  const Vector3 e = plant.q_e.vec();
  for (int i = 0; i < 3; ++i) {
    const RpfSample r = rho_at(setup.profiles[i], t);
    const DeltaSample d = delta_at(setup.profiles[i], setup.constraint, t);
    tr[i] = transform_axis(e(i), r.value, r.derivative, d.value, d.rate, setup.shear);
    out.tube[i] = {r.value, d.value, tr[i].z_s, tr[i].eps_s};
  }
  const FirstLayer layer = first_layer(tr);
  ctl.v1 = 0.5 * layer.eps.squaredNorm();
  const Vector3 alpha = virtual_control(plant.q_e, layer, setup.gains);
  out.u = backstep_tail(plant, setup.ref, setup.inertia, setup.gains, ctl, alpha, t, dt);
  return out;
}

// --- TraPPC -----------------------------------------------------------------

double trappc_transform(double z_s, double k_const) {
  if (!(z_s > -k_const && z_s < 1.0)) throw DomainViolation("normalized error " + std::to_string(z_s), -1);
  return std::log((k_const + z_s) / (k_const * (1.0 - z_s)));
}

double trappc_transform_slope(double z_s, double k_const) { return 1.0 / (k_const + z_s) + 1.0 / (1.0 - z_s); }

RpfSample ExpPerformance::at(double t) const {
  const double ex = std::exp(-l * t);
  return {sign * ((rho_0 - rho_inf) * ex + rho_inf), -sign * l * (rho_0 - rho_inf) * ex};
}

StepResult trappc_step(const ErrorState<double>& plant, const TrappcSetup& setup, ControllerState& ctl, double t,
                       double dt) {
  StepResult out;
  FirstLayer layer;
  const Vector3 e = plant.q_e.vec();
  const double k = setup.k_const;
  for (int i = 0; i < 3; ++i) {
    const RpfSample r = setup.performance[i].at(t);
    const double z = e(i) / r.value;
    double eps;
    try {
      eps = trappc_transform(z, k);
    } catch (const DomainViolation&) {
      throw DomainViolation("normalized error " + std::to_string(z) + " left (-K, 1) at t = " + std::to_string(t), i);
    }
    layer.eps(i) = eps;
    layer.psi(i) = trappc_transform_slope(z, k) / r.value;
    layer.eta(i) = -r.derivative / r.value;
    // Centre of (-K rho, rho) and half-width over centre, so |z - 1| < delta means inside.
    const double centre = 0.5 * r.value * (1.0 - k);
    out.tube[i] = {centre, (1.0 + k) / (1.0 - k), e(i) / centre, eps};
  }
  ctl.v1 = 0.5 * layer.eps.squaredNorm();
  const Vector3 alpha = virtual_control(plant.q_e, layer, setup.gains);
  out.u = backstep_tail(plant, setup.ref, setup.inertia, setup.gains, ctl, alpha, t, dt);
  return out;
}

// --- BLFPPC -----------------------------------------------------------------

FtppfParams FtppfParams::make(double rho_start, double rho_tf, double t_f, double m) {
  FtppfParams f;
  f.rho_0 = rho_start - rho_tf;
  f.m = m;
  f.rho_tf = rho_tf;
  f.t_f = t_f;
  f.lambda = std::pow(f.rho_0, m) / (m * t_f);
  return f;
}

void FtppfParams::validate() const {
  if (!(rho_0 > 0.0)) throw ValidationError("blf.rho_0", "must be > 0");
  if (!(m > 0.0 && m < 1.0)) throw ValidationError("blf.m", "must lie in (0, 1)");
  if (!(lambda > 0.0)) throw ValidationError("blf.lambda", "must be > 0");
  if (!(rho_tf > 0.0)) throw ValidationError("blf.rho_tf", "must be > 0");
  if (!(t_f > 0.0)) throw ValidationError("blf.t_f", "must be > 0");
}

RpfSample ftppf_at(const FtppfParams& f, double t) {
  const double base = std::pow(f.rho_0, f.m) - f.m * f.lambda * t;
  if (!(base > 0.0)) return {f.rho_tf, 0.0};
  return {std::pow(base, 1.0 / f.m) + f.rho_tf, -f.lambda * std::pow(base, (1.0 - f.m) / f.m)};
}

StepResult blfppc_step(const ErrorState<double>& plant, const BlfppcSetup& setup, ControllerState& ctl, double t,
                       double dt) {
  StepResult out;
  const Vector3 e = plant.q_e.vec();
  Vector3 eps, sum, s_v, d_rho;
  for (int i = 0; i < 3; ++i) {
    const RpfSample f = ftppf_at(setup.bounds[i], t);
    double up = f.value, up_dot = f.derivative, lo = 0.0, lo_dot = 0.0;
    if (setup.sign[i] < 0) {
      lo = -f.value;
      lo_dot = -f.derivative;
      up = 0.0;
      up_dot = 0.0;
    }
    const double width = up - lo;
    sum(i) = up + lo;
    eps(i) = (2.0 * e(i) - sum(i)) / width;
    const double s_b = lo_dot * up - up_dot * lo;
    s_v(i) = ((up_dot - lo_dot) * e(i) + s_b) / width;
    d_rho(i) = 1.0 / ((1.0 - eps(i) * eps(i)) * width);
    const double centre = 0.5 * sum(i);
    out.tube[i] = {centre, 0.5 * width / std::abs(centre), e(i) / centre, eps(i)};
  }
  const BlfppcGains& g = setup.blf;
  const Matrix3 g_inv = jacobian_inverse(plant.q_e);
  const Vector3 alpha = g_inv * (-g.k1 * e + 0.5 * g.k1 * sum + s_v);
  ctl.v1 = 0.5 * eps.squaredNorm();

  ctl.alpha = alpha;
  if (!ctl.initialized) {
    ctl.s_d = alpha;
    ctl.initialized = true;
  }
  ctl.h_d = ctl.s_d - alpha;
  const double g3 = dsc_filter_gain(ctl.h_d, setup.gains);
  const Vector3 s_d_dot = -g3 * ctl.h_d;
  ctl.z2 = plant.omega_e - ctl.s_d;
  const Inertia<double>& in = setup.inertia;
  out.u = -g.k2 * (in.J * ctl.z2) - 2.0 * g.k3 * (g_inv * d_rho.cwiseProduct(eps)) -
          dynamics_feedforward(plant, setup.ref, in, t) + in.J * s_d_dot -
          setup.gains.d_m * tanh_term(ctl.z2, setup.gains.mu);
  ctl.v2 = 0.5 * ctl.z2.dot(in.J * ctl.z2);
  ctl.v3 = 0.5 * ctl.h_d.squaredNorm();
  advance_filter(ctl, g3, dt);
  return out;
}

}  // namespace sappc
