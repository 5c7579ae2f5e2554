#include "sappc/rpf.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <string>

#include "sappc/errors.hpp"

namespace sappc {
namespace {

double exp_value(const RpfParams& p, double t) {
  return (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t) + p.rho_einf;
}

double exp_rate(const RpfParams& p, double t) { return -p.l * (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t); }

// Bisection to the resolution of double on [lo, hi] with f(lo), f(hi) of opposite sign.
double bisect(const RpfParams& p, double lo, double hi) {
  double f_lo = junction_residual(p, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = junction_residual(p, mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(junction_residual(p, lo)) <= std::abs(junction_residual(p, hi)) ? lo : hi;
}

}  // namespace

void RpfParams::validate() const {
  if (!(rho_einf > 0.0)) throw ValidationError("rho_einf", "must be > 0");
  if (!(rho_e0 > rho_einf)) throw ValidationError("rho_e0", "must exceed rho_einf");
  if (!(g_inf > rho_einf)) throw ValidationError("g_inf", "must exceed rho_einf (rho_einf < g_inf)");
  if (!(t2 > 0.0)) throw ValidationError("t2", "must be > 0");
  if (!(l > 0.0)) throw ValidationError("l", "must be > 0");
  if (sign != 1 && sign != -1) throw ValidationError("sign", "must be +1 or -1");
}

void ConstraintParams::validate() const {
  if (!(b0 > 0.0)) throw ValidationError("b0", "must be > 0");
}

// With s = t2 - t1, continuity at t1 and t2 plus matching slopes at both ends
// force a1 = l A e^{-l t1} / (2 s), leaving f(t1) = [l s / 2 - 1] A e^{-l t1} + g_inf - rho_einf.
double junction_residual(const RpfParams& p, double t1) {
  const double amp = (p.rho_e0 - p.rho_einf) * std::exp(-p.l * t1);
  return (0.5 * p.l * (p.t2 - t1) - 1.0) * amp + p.g_inf - p.rho_einf;
}

RpfProfile solve_profile(const RpfParams& params, JunctionMode mode) {
  params.validate();
  const double t2 = params.t2;
  constexpr double kEdge = 1e-6;

  // f decreases up to t2 - 1/l and increases afterwards, so that point is a scan node.
  const double t_min = t2 - 1.0 / params.l;
  constexpr int kScan = 20000;
  std::vector<double> nodes;
  nodes.reserve(kScan + 2);
  for (int k = 0; k <= kScan; ++k) nodes.push_back(kEdge + (t2 - 2 * kEdge) * k / kScan);
  if (t_min > kEdge && t_min < t2 - kEdge) nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), t_min), t_min);

  double root = -1.0;
  double prev_f = junction_residual(params, nodes.front());
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double f = junction_residual(params, nodes[k]);
    if (f == 0.0) {
      root = nodes[k];
      break;
    }
    if ((f > 0.0) != (prev_f > 0.0)) {
      root = bisect(params, nodes[k - 1], nodes[k]);
      break;
    }
    prev_f = f;
  }

  RpfProfile prof;
  prof.params = params;
  if (root > 0.0) {
    const double s = t2 - root;
    prof.t1 = root;
    prof.a1 = params.l * (params.rho_e0 - params.rho_einf) * std::exp(-params.l * root) / (2.0 * s);
    prof.smooth = true;
  } else {
    if (mode == JunctionMode::smooth || !(t_min > 0.0))
      throw NoJunctionRoot("junction equation has no sign change on (0, t2)");
    const double gap = exp_value(params, t_min) - params.g_inf;
    if (!(gap > 0.0))
      throw NoJunctionRoot("exponential part reaches g_inf before the closest-approach junction");
    const double s = t2 - t_min;
    prof.t1 = t_min;
    prof.a1 = gap / (s * s);
    prof.smooth = false;
  }
  prof.a2 = -2.0 * prof.a1 * t2;
  prof.a3 = params.g_inf + prof.a1 * t2 * t2;
  prof.slope_jump = (2.0 * prof.a1 * prof.t1 + prof.a2) - exp_rate(params, prof.t1);
  if (prof.smooth) prof.slope_jump = 0.0;
  return prof;
}

RpfSample rho_at(const RpfProfile& prof, double t) {
  const RpfParams& p = prof.params;
  const double s = p.sign;
  if (t < prof.t1) return {s * exp_value(p, t), s * exp_rate(p, t)};
  if (t < p.t2) return {s * ((prof.a1 * t + prof.a2) * t + prof.a3), s * (2.0 * prof.a1 * t + prof.a2)};
  return {s * p.g_inf, 0.0};
}

DeltaSample delta_at(const RpfProfile& prof, const ConstraintParams& c, double t) {
  const RpfSample r = rho_at(prof, t);
  const double mag = std::abs(r.value);
  // d|rho|/dt = sign * rho'
  const double mag_rate = prof.params.sign * r.derivative;
  return {c.b0 / mag, -c.b0 * mag_rate / (mag * mag)};
}

RpfParams params_for_initial_error(const RpfParams& base, double e0, bool rho_from_error, double floor) {
  RpfParams p = base;
  p.sign = e0 < 0.0 ? -1 : 1;
  if (rho_from_error) p.rho_e0 = std::max(std::abs(e0), floor);
  return p;
}

}  // namespace sappc
