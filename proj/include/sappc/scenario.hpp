#pragma once

// Full parameter tree of one closed-loop scenario. Defaults are neutral;
// every experiment's numbers come from a config file.

#include <cstdint>
#include <optional>
#include <string>

#include "sappc/attitude.hpp"
#include "sappc/controllers.hpp"
#include "sappc/rpf.hpp"

namespace sappc {

enum class ScenarioKind { nominal, comparison, pulse, custom };
enum class ControllerKind { sappc, trappc, blfppc };

std::string to_string(ScenarioKind k);
std::string to_string(ControllerKind k);
ScenarioKind parse_scenario_kind(const std::string& s);
ControllerKind parse_controller_kind(const std::string& s);

struct SimConfig {
  double dt = 0.01;
  double duration = 100.0;
  ScenarioKind scenario = ScenarioKind::custom;
  ControllerKind controller = ControllerKind::sappc;
  std::uint64_t seed = 0;
  std::string output;
};

struct RpfConfig {
  RpfParams base;
  bool rho_from_error = false;  // rho_e0 = |q_evi(0)| per axis
  double rho_floor = 0.05;
  JunctionMode junction = JunctionMode::automatic;
};

/// Exponential performance function for the log-transform benchmark. Unset
/// fields fall back to the exponential branch of the [rpf] block.
struct TrappcConfig {
  double k_const = 0.3;
  std::optional<double> rho_0, rho_inf, l;
};

/// Barrier benchmark: tube (0, rho_u) or (-rho_u, 0) following the sign of
/// q_evi(0); rho_u starts at rho_scale * |q_evi(0)| (floored) and lands on rho_tf at t_f.
struct BlfConfig {
  BlfppcGains gains;
  double m = 0.5;
  double rho_tf = 1e-3;
  double t_f = 20.0;
  double rho_scale = 2.0;
  double rho_floor = 0.05;
};

struct CampaignBlock {
  int n_runs = 200;
  double euler_range_deg = 85.0;
  int threads = 0;  // 0: hardware concurrency
  bool write_trajectories = false;
};

struct ScenarioConfig {
  Matrix3 inertia = Matrix3::Identity();
  ReferenceTrajectory<double> reference;
  DisturbanceModel<double> disturbance;
  ActuatorLimits<double> actuator;
  Quaternion q_s0 = Quaternion::Identity();
  Vector3 omega_s0 = Vector3::Zero();
  RpfConfig rpf;
  ConstraintParams constraint{1.5e-5};
  double shear_deg = 10.0;
  SappcGains gains;
  TrappcConfig trappc;
  BlfConfig blf;
  SimConfig sim;
  CampaignBlock campaign;

  /// Every module's parameter invariant; throws ValidationError.
  void validate() const;
};

}  // namespace sappc
