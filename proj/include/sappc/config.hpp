#pragma once

// Scenario config files.
//
// Grammar: INI. `[section]` headers, `key = value` lines, `;` starts a
// comment line. Vectors are whitespace-separated numbers; quaternions are
// stored scalar-last (x y z w). Every key is optional and unknown sections or
// keys are rejected. Sections and keys:
//
//   [sim]         dt duration scenario controller seed output
//   [plant]       inertia (3 diagonal or 9 row-major values) q_s0 omega_s0
//   [reference]   q_d0, amplitude (rad/s) or amplitude_deg (deg/s), periods
//   [disturbance] sin_amp sin_harmonic cos_amp cos_harmonic offset omega_p
//                 pulse_onset pulse_duration pulse_amplitude
//   [actuator]    u_max u_min
//   [rpf]         rho_e0 rho_einf l t2 g_inf rho_from_error rho_floor junction
//   [constraint]  b0
//   [shear]       theta_deg
//   [sappc]       k_q k_omega p t1_gain t2_gain t3_gain mu d_m v_floor
//   [trappc]      k_const rho_0 rho_inf l (profile defaults from [rpf])
//   [blfppc]      k1 k2 k3 m rho_tf t_f rho_scale rho_floor
//   [campaign]    n_runs euler_range_deg threads write_trajectories

#include <iosfwd>
#include <string>

#include "sappc/scenario.hpp"

namespace sappc {

/// Throws ParseError (file:line) for malformed files and ValidationError
/// (section.key + rule) for bad values, unknown keys and failed invariants.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(std::istream& in, const std::string& name);

/// Writes every key at full precision; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ScenarioConfig& cfg);

/// 64-bit FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace sappc
