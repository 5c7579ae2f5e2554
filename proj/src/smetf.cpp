#include "sappc/smetf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sappc/errors.hpp"

namespace sappc {
namespace {

constexpr int kMaxIterations = 100;
constexpr double kResidualTol = 1e-12;

// The implicit equation is solved for eps = R(z0) rather than z0 itself:
// z0 = 1 + (2 delta / pi) atan(eps), so the strip maps onto the whole real
// line and h(eps) = (2 delta / pi) atan(eps) + eps tan(theta) is strictly
// increasing with h' >= tan(theta). Far from the strip z0 sits within a few
// ulps of its edge while eps stays well resolved.
double solve_eps(double z_s, double delta, const ShearParams& shear) {
  if (!(delta > 0.0)) throw BranchViolation("constraint half-width must be positive");
  if (!std::isfinite(z_s)) throw ConvergenceFailure("z_s is not finite");
  const double c = z_s - 1.0;
  const double k = 2.0 * delta / std::numbers::pi;
  const double tol = kResidualTol * std::max(1.0, std::abs(z_s));
  auto h = [&](double eps) { return k * std::atan(eps) + eps * shear.tan_theta - c; };

  double bound = (std::abs(c) + delta) / shear.tan_theta;
  double lo = -bound;
  double hi = bound;
  double eps = std::clamp(c / (k + shear.tan_theta), lo, hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double r = h(eps);
    if (std::abs(r) <= tol) return std::clamp(eps, -kEpsSaturation, kEpsSaturation);
    if (r > 0.0)
      hi = eps;
    else
      lo = eps;
    const double slope = k / (1.0 + eps * eps) + shear.tan_theta;
    double next = eps - r / slope;
    // Outside the bracket fall back to bisecting the strip, i.e. in atan(eps).
    if (!(next > lo && next < hi)) next = std::tan(0.5 * (std::atan(lo) + std::atan(hi)));
    if (next == eps) break;
    eps = next;
  }
  if (std::abs(h(eps)) <= tol) return std::clamp(eps, -kEpsSaturation, kEpsSaturation);
  throw ConvergenceFailure("shear pre-image did not converge for z_s = " + std::to_string(z_s));
}

}  // namespace

ShearParams::ShearParams(double theta_rad) : theta(theta_rad), tan_theta(std::tan(theta_rad)) {
  if (!(theta_rad > 0.0 && theta_rad < 0.5 * std::numbers::pi))
    throw ValidationError("theta", "shear angle must lie in (0, pi/2)");
}

ShearParams ShearParams::from_degrees(double deg) { return ShearParams(deg * std::numbers::pi / 180.0); }

double base_transform(double z0, double delta) {
  if (!(delta > 0.0) || !(z0 > 1.0 - delta && z0 < 1.0 + delta))
    throw BranchViolation("z0 = " + std::to_string(z0) + " outside the principal branch");
  return std::tan(std::numbers::pi / (2.0 * delta) * (z0 - 1.0));
}

double solve_z0(double z_s, double delta, const ShearParams& shear) {
  const double eps = solve_eps(z_s, delta, shear);
  return 1.0 + 2.0 * delta / std::numbers::pi * std::atan(eps);
}

AxisTransform transform_axis(double e, double rho, double rho_dot, double delta, double delta_dot,
                             const ShearParams& shear) {
  AxisTransform a;
  a.z_s = e / rho;
  a.eps_s = solve_eps(a.z_s, delta, shear);
  a.z_0 = 1.0 + 2.0 * delta / std::numbers::pi * std::atan(a.eps_s);
  const double sec2 = a.eps_s * a.eps_s + 1.0;
  const double pi = std::numbers::pi;
  a.p_s = pi * sec2 / (pi * sec2 * shear.tan_theta + 2.0 * delta);
  a.psi = a.p_s / rho;
  a.eta = -rho_dot / rho;
  // dR/d(delta) at fixed z0, then divided by (1 + P0 tan(theta)) because z0
  // itself moves with delta when z_s is held fixed.
  const double dr_ddelta = -0.5 * pi * sec2 * (a.z_0 - 1.0) / (delta * delta);
  a.xi = dr_ddelta * (a.p_s / (0.5 * pi / delta * sec2)) * delta_dot;
  return a;
}

std::pair<double, double> shear_points(double x0, double y0, const ShearParams& shear) {
  return {x0 + y0 * shear.tan_theta, y0};
}

}  // namespace sappc
