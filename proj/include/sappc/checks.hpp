#pragma once

// Self-test suites behind `sappc_lab check`: analytic properties of the
// transforms, the profile solver and the settling-time oracle, plus
// conservation and determinism checks on the simulation.

#include <cstdint>
#include <string>
#include <vector>

#include "sappc/scenario.hpp"

namespace sappc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // worst case or first failure
};

/// 0 <= |x| - x tanh(x/mu) <= 0.2785 mu on a dense grid.
CheckResult check_tanh_gap();

/// Settling and residual-set entry times of the scalar oracle against their bounds.
CheckResult check_settling_oracle();

/// Random profiles: junction continuity and slope matching, |rho| non-increasing,
/// delta non-decreasing with delta |rho| = b0.
CheckResult check_rpf_profiles(std::uint64_t seed, int n_sets = 100);

/// Pre-image solvable over a wide log grid, shear relation, monotonicity and sign.
CheckResult check_smetf_global();

/// Horizontal-squeeze identity on random pre-images.
CheckResult check_smetf_squeeze(std::uint64_t seed);

/// d eps / d z_s and the full d eps / dt chain against central differences.
CheckResult check_smetf_sensitivity();

/// eps * xi <= 0 whenever delta is non-decreasing.
CheckResult check_sign_gate(std::uint64_t seed);

/// Rotation matrix orthonormality, Jacobian determinant, unit-norm kinematics.
CheckResult check_attitude_algebra(std::uint64_t seed);

/// Torque-free rotation keeps kinetic energy and angular momentum; quaternion
/// drift per step stays small before renormalization.
CheckResult check_free_rotation();

/// The periodic disturbance stays under its declared bound over one period.
CheckResult check_disturbance_bound(const ScenarioConfig& cfg);

/// Two runs of the same config produce bit-identical logs.
CheckResult check_determinism(const ScenarioConfig& cfg);

/// Every suite above; the scenario-dependent ones run only when cfg is given.
std::vector<CheckResult> run_all_checks(const ScenarioConfig* cfg, std::uint64_t seed = 1);

}  // namespace sappc
