#pragma once

// Shear-mapping error transformation.
//
// The base transform R(z0) = tan(pi / (2 delta) (z0 - 1)) is only defined on the
// strip (1 - delta, 1 + delta). Shearing its graph by theta tilts the two
// asymptotes, so the sheared transform eps_s = R(z_s - eps_s tan(theta)) is
// defined for every real z_s. Evaluating it means solving
//
//   z0 + R(z0) tan(theta) - z_s = 0
//
// for the pre-image z0 on the strip; eps_s is then R(z0).

#include <utility>

namespace sappc {

struct ShearParams {
  double theta;
  double tan_theta;

  explicit ShearParams(double theta_rad);
  static ShearParams from_degrees(double deg);
};

struct AxisTransform {
  double z_s = 0.0;
  double z_0 = 0.0;
  double eps_s = 0.0;
  double p_s = 0.0;   // d eps_s / d z_s
  double psi = 0.0;   // p_s / rho
  double eta = 0.0;   // -rho_dot / rho
  double xi = 0.0;    // (d eps_s / d delta) * delta_dot
};

/// |eps_s| is saturated here before it feeds the sensitivities.
inline constexpr double kEpsSaturation = 1e12;

/// R(z0); throws BranchViolation outside the open strip.
double base_transform(double z0, double delta);

/// Unique pre-image z0 on the strip; throws ConvergenceFailure if the iteration budget runs out.
double solve_z0(double z_s, double delta, const ShearParams& shear);

/// Full per-axis evaluation: normalized error, translated error and sensitivities.
AxisTransform transform_axis(double e, double rho, double rho_dot, double delta, double delta_dot,
                             const ShearParams& shear);

std::pair<double, double> shear_points(double x0, double y0, const ShearParams& shear);

}  // namespace sappc
