#include "sappc/config.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sappc/errors.hpp"

namespace sappc {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"sim", {"dt", "duration", "scenario", "controller", "seed", "output"}},
      {"plant", {"inertia", "q_s0", "omega_s0"}},
      {"reference", {"q_d0", "amplitude", "amplitude_deg", "periods"}},
      {"disturbance",
       {"sin_amp", "sin_harmonic", "cos_amp", "cos_harmonic", "offset", "omega_p", "pulse_onset", "pulse_duration",
        "pulse_amplitude"}},
      {"actuator", {"u_max", "u_min"}},
      {"rpf", {"rho_e0", "rho_einf", "l", "t2", "g_inf", "rho_from_error", "rho_floor", "junction"}},
      {"constraint", {"b0"}},
      {"shear", {"theta_deg"}},
      {"sappc", {"k_q", "k_omega", "p", "t1_gain", "t2_gain", "t3_gain", "mu", "d_m", "v_floor"}},
      {"trappc", {"k_const", "rho_0", "rho_inf", "l"}},
      {"blfppc", {"k1", "k2", "k3", "m", "rho_tf", "t_f", "rho_scale", "rho_floor"}},
      {"campaign", {"n_runs", "euler_range_deg", "threads", "write_trajectories"}},
  };
  return s;
}

std::vector<double> numbers(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ValidationError(key, "'" + tok + "' is not a number");
    }
    if (used != tok.size()) throw ValidationError(key, "'" + tok + "' is not a number");
    out.push_back(v);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename F>
  void with(const std::string& section, const std::string& key, F&& f) const {
    const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return;
    const auto val = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!val) return;
    f(section + "." + key, *val);
  }

  void num(const std::string& s, const std::string& k, double& dst) const {
    with(s, k, [&](const std::string& key, const std::string& v) {
      const auto n = numbers(key, v);
      if (n.size() != 1) throw ValidationError(key, "expects one number");
      dst = n[0];
    });
  }

  void integer(const std::string& s, const std::string& k, long long& dst) const {
    double v = static_cast<double>(dst);
    num(s, k, v);
    if (v != static_cast<double>(static_cast<long long>(v))) throw ValidationError(s + "." + k, "must be an integer");
    dst = static_cast<long long>(v);
  }

  void seed(const std::string& s, const std::string& k, std::uint64_t& dst) const {
    with(s, k, [&](const std::string& key, const std::string& v) {
      std::size_t used = 0;
      try {
        dst = std::stoull(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != v.size()) throw ValidationError(key, "must be an unsigned 64-bit integer");
    });
  }

  void vec3(const std::string& s, const std::string& k, Vector3& dst) const {
    with(s, k, [&](const std::string& key, const std::string& v) {
      const auto n = numbers(key, v);
      if (n.size() != 3) throw ValidationError(key, "expects three numbers");
      dst = Vector3(n[0], n[1], n[2]);
    });
  }

  void quat(const std::string& s, const std::string& k, Quaternion& dst) const {
    with(s, k, [&](const std::string& key, const std::string& v) {
      const auto n = numbers(key, v);
      if (n.size() != 4) throw ValidationError(key, "expects four numbers (x y z w)");
      dst = from_xyzw(Vector4(n[0], n[1], n[2], n[3]));
    });
  }

  void flag(const std::string& s, const std::string& k, bool& dst) const {
    with(s, k, [&](const std::string& key, const std::string& v) {
      if (v == "true" || v == "1")
        dst = true;
      else if (v == "false" || v == "0")
        dst = false;
      else
        throw ValidationError(key, "must be true or false");
    });
  }

  void text(const std::string& s, const std::string& k, std::string& dst) const {
    with(s, k, [&](const std::string&, const std::string& v) { dst = v; });
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError(section, "key outside any section");
    const auto it = schema().find(section);
    if (it == schema().end()) throw ValidationError(section, "unknown section");
    for (const auto& [key, leaf] : body) {
      if (!leaf.empty()) throw ValidationError(section + "." + key, "nested keys are not supported");
      if (!it->second.count(key)) throw ValidationError(section + "." + key, "unknown key");
    }
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Vector3& v) { return fmt(v(0)) + " " + fmt(v(1)) + " " + fmt(v(2)); }

std::string fmt(const Quaternion& q) { return fmt(q.x()) + " " + fmt(q.y()) + " " + fmt(q.z()) + " " + fmt(q.w()); }

template <typename F>
void prefixed(const std::string& section, F&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    throw ValidationError(section + "." + e.key(), e.rule());
  }
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::nominal: return "nominal";
    case ScenarioKind::comparison: return "comparison";
    case ScenarioKind::pulse: return "pulse";
    case ScenarioKind::custom: return "custom";
  }
  return "custom";
}

std::string to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::sappc: return "sappc";
    case ControllerKind::trappc: return "trappc";
    case ControllerKind::blfppc: return "blfppc";
  }
  return "sappc";
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  for (auto k : {ScenarioKind::nominal, ScenarioKind::comparison, ScenarioKind::pulse, ScenarioKind::custom})
    if (to_string(k) == s) return k;
  throw ValidationError("scenario", "must be nominal, comparison, pulse or custom");
}

ControllerKind parse_controller_kind(const std::string& s) {
  for (auto k : {ControllerKind::sappc, ControllerKind::trappc, ControllerKind::blfppc})
    if (to_string(k) == s) return k;
  throw ValidationError("controller", "must be sappc, trappc or blfppc");
}

void ScenarioConfig::validate() const {
  if (!(sim.dt > 0.0 && sim.dt <= 0.05)) throw ValidationError("sim.dt", "must lie in (0, 0.05]");
  if (!(sim.duration >= rpf.base.t2)) throw ValidationError("sim.duration", "must be >= rpf.t2");
  prefixed("plant", [&] { Inertia<double> check(inertia); });
  if (!(std::abs(q_s0.norm() - 1.0) < 1e-3)) throw ValidationError("plant.q_s0", "must be a unit quaternion");
  if (!omega_s0.allFinite()) throw ValidationError("plant.omega_s0", "must be finite");
  if (!(std::abs(reference.q_d0.norm() - 1.0) < 1e-3))
    throw ValidationError("reference.q_d0", "must be a unit quaternion");
  if (!std::isfinite(reference.amplitude)) throw ValidationError("reference.amplitude", "must be finite");
  if (!(reference.periods.array() > 0.0).all()) throw ValidationError("reference.periods", "must be > 0");
  if (!(disturbance.omega_p >= 0.0)) throw ValidationError("disturbance.omega_p", "must be >= 0");
  if (disturbance.pulse && !(disturbance.pulse->duration > 0.0))
    throw ValidationError("disturbance.pulse_duration", "must be > 0 when a pulse is configured");
  if (!(actuator.u_max > 0.0)) throw ValidationError("actuator.u_max", "must be > 0");
  if (!(actuator.u_min >= 0.0 && actuator.u_min < actuator.u_max))
    throw ValidationError("actuator.u_min", "must lie in [0, u_max)");
  prefixed("rpf", [&] {
    RpfParams p = rpf.base;
    if (rpf.rho_from_error) {
      if (!(rpf.rho_floor > p.rho_einf)) throw ValidationError("rho_floor", "must exceed rho_einf");
      p.rho_e0 = rpf.rho_floor;
    }
    p.validate();
  });
  prefixed("constraint", [&] { constraint.validate(); });
  prefixed("shear", [&] {
    if (!(shear_deg > 0.0 && shear_deg < 90.0)) throw ValidationError("theta_deg", "must lie in (0, 90)");
  });
  prefixed("sappc", [&] { gains.validate(); });
  if (!(trappc.k_const > 0.0 && trappc.k_const < 1.0))
    throw ValidationError("trappc.k_const", "must lie in (0, 1)");
  const double tra_inf = trappc.rho_inf.value_or(rpf.base.rho_einf);
  if (!(tra_inf > 0.0)) throw ValidationError("trappc.rho_inf", "must be > 0");
  if (!(trappc.rho_0.value_or(rpf.base.rho_e0) > tra_inf)) throw ValidationError("trappc.rho_0", "must exceed rho_inf");
  if (!(trappc.l.value_or(rpf.base.l) > 0.0)) throw ValidationError("trappc.l", "must be > 0");
  if (!(blf.gains.k1 > 0.0)) throw ValidationError("blfppc.k1", "must be > 0");
  if (!(blf.gains.k2 > 0.0)) throw ValidationError("blfppc.k2", "must be > 0");
  if (!(blf.gains.k3 > 0.0)) throw ValidationError("blfppc.k3", "must be > 0");
  if (!(blf.m > 0.0 && blf.m < 1.0)) throw ValidationError("blfppc.m", "must lie in (0, 1)");
  if (!(blf.rho_tf > 0.0)) throw ValidationError("blfppc.rho_tf", "must be > 0");
  if (!(blf.t_f > 0.0)) throw ValidationError("blfppc.t_f", "must be > 0");
  if (!(blf.rho_scale > 1.0)) throw ValidationError("blfppc.rho_scale", "must be > 1");
  if (!(blf.rho_floor > blf.rho_tf)) throw ValidationError("blfppc.rho_floor", "must exceed rho_tf");
  if (!(campaign.n_runs >= 1)) throw ValidationError("campaign.n_runs", "must be >= 1");
  if (!(campaign.euler_range_deg > 0.0 && campaign.euler_range_deg < 90.0))
    throw ValidationError("campaign.euler_range_deg", "must lie in (0, 90)");
  if (!(campaign.threads >= 0)) throw ValidationError("campaign.threads", "must be >= 0");
}

ScenarioConfig parse_config(std::istream& in, const std::string& name) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(name, e.line(), e.message());
  }
  check_keys(tree);
  const Reader r(tree);
  ScenarioConfig c;

  r.num("sim", "dt", c.sim.dt);
  r.num("sim", "duration", c.sim.duration);
  r.with("sim", "scenario", [&](const std::string&, const std::string& v) {
    prefixed("sim", [&] { c.sim.scenario = parse_scenario_kind(v); });
  });
  r.with("sim", "controller", [&](const std::string&, const std::string& v) {
    prefixed("sim", [&] { c.sim.controller = parse_controller_kind(v); });
  });
  r.seed("sim", "seed", c.sim.seed);
  r.text("sim", "output", c.sim.output);

  r.with("plant", "inertia", [&](const std::string& key, const std::string& v) {
    const auto n = numbers(key, v);
    if (n.size() == 3)
      c.inertia = Vector3(n[0], n[1], n[2]).asDiagonal();
    else if (n.size() == 9)
      c.inertia = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(n.data());
    else
      throw ValidationError(key, "expects 3 diagonal or 9 row-major values");
  });
  r.quat("plant", "q_s0", c.q_s0);
  r.vec3("plant", "omega_s0", c.omega_s0);

  r.quat("reference", "q_d0", c.reference.q_d0);
  r.num("reference", "amplitude", c.reference.amplitude);
  r.with("reference", "amplitude_deg", [&](const std::string& key, const std::string&) {
    r.with("reference", "amplitude", [&](const std::string&, const std::string&) {
      throw ValidationError(key, "give amplitude (rad/s) or amplitude_deg (deg/s), not both");
    });
    double deg = 0.0;
    r.num("reference", "amplitude_deg", deg);
    c.reference.amplitude = deg * std::numbers::pi / 180.0;
  });
  r.vec3("reference", "periods", c.reference.periods);

  auto& d = c.disturbance;
  r.vec3("disturbance", "sin_amp", d.sin_amp);
  r.vec3("disturbance", "sin_harmonic", d.sin_harmonic);
  r.vec3("disturbance", "cos_amp", d.cos_amp);
  r.vec3("disturbance", "cos_harmonic", d.cos_harmonic);
  r.vec3("disturbance", "offset", d.offset);
  r.num("disturbance", "omega_p", d.omega_p);
  Pulse<double> pulse{0.0, 0.0, Vector3::Zero()};
  bool has_pulse = false;
  r.with("disturbance", "pulse_amplitude", [&](const std::string&, const std::string&) { has_pulse = true; });
  r.num("disturbance", "pulse_onset", pulse.onset);
  r.num("disturbance", "pulse_duration", pulse.duration);
  r.vec3("disturbance", "pulse_amplitude", pulse.amplitude);
  if (has_pulse) d.pulse = pulse;

  r.num("actuator", "u_max", c.actuator.u_max);
  r.num("actuator", "u_min", c.actuator.u_min);

  r.num("rpf", "rho_e0", c.rpf.base.rho_e0);
  r.num("rpf", "rho_einf", c.rpf.base.rho_einf);
  r.num("rpf", "l", c.rpf.base.l);
  r.num("rpf", "t2", c.rpf.base.t2);
  r.num("rpf", "g_inf", c.rpf.base.g_inf);
  r.flag("rpf", "rho_from_error", c.rpf.rho_from_error);
  r.num("rpf", "rho_floor", c.rpf.rho_floor);
  r.with("rpf", "junction", [&](const std::string& key, const std::string& v) {
    if (v == "smooth")
      c.rpf.junction = JunctionMode::smooth;
    else if (v == "automatic")
      c.rpf.junction = JunctionMode::automatic;
    else
      throw ValidationError(key, "must be smooth or automatic");
  });

  r.num("constraint", "b0", c.constraint.b0);
  r.num("shear", "theta_deg", c.shear_deg);

  auto& g = c.gains;
  r.num("sappc", "k_q", g.k_q);
  r.num("sappc", "k_omega", g.k_omega);
  r.num("sappc", "p", g.p);
  r.num("sappc", "t1_gain", g.t1_gain);
  r.num("sappc", "t2_gain", g.t2_gain);
  r.num("sappc", "t3_gain", g.t3_gain);
  r.vec3("sappc", "mu", g.mu);
  r.num("sappc", "d_m", g.d_m);
  r.num("sappc", "v_floor", g.v_floor);

  r.num("trappc", "k_const", c.trappc.k_const);
  for (auto [key, dst] : {std::pair{"rho_0", &c.trappc.rho_0}, {"rho_inf", &c.trappc.rho_inf}, {"l", &c.trappc.l}}) {
    double v = 0.0;
    bool seen = false;
    r.with("trappc", key, [&](const std::string&, const std::string&) { seen = true; });
    if (!seen) continue;
    r.num("trappc", key, v);
    *dst = v;
  }

  r.num("blfppc", "k1", c.blf.gains.k1);
  r.num("blfppc", "k2", c.blf.gains.k2);
  r.num("blfppc", "k3", c.blf.gains.k3);
  r.num("blfppc", "m", c.blf.m);
  r.num("blfppc", "rho_tf", c.blf.rho_tf);
  r.num("blfppc", "t_f", c.blf.t_f);
  r.num("blfppc", "rho_scale", c.blf.rho_scale);
  r.num("blfppc", "rho_floor", c.blf.rho_floor);

  long long n_runs = c.campaign.n_runs, threads = c.campaign.threads;
  r.integer("campaign", "n_runs", n_runs);
  r.integer("campaign", "threads", threads);
  c.campaign.n_runs = static_cast<int>(n_runs);
  c.campaign.threads = static_cast<int>(threads);
  r.num("campaign", "euler_range_deg", c.campaign.euler_range_deg);
  r.flag("campaign", "write_trajectories", c.campaign.write_trajectories);

  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return parse_config(in, path);
}

std::string serialize_config(const ScenarioConfig& c) {
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  os << "[sim]\n";
  kv("dt", fmt(c.sim.dt));
  kv("duration", fmt(c.sim.duration));
  kv("scenario", to_string(c.sim.scenario));
  kv("controller", to_string(c.sim.controller));
  kv("seed", std::to_string(c.sim.seed));
  if (!c.sim.output.empty()) kv("output", c.sim.output);
  os << "\n[plant]\n";
  const Matrix3& J = c.inertia;
  std::string jt;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) jt += (jt.empty() ? "" : " ") + fmt(J(i, j));
  kv("inertia", jt);
  kv("q_s0", fmt(c.q_s0));
  kv("omega_s0", fmt(c.omega_s0));
  os << "\n[reference]\n";
  kv("q_d0", fmt(c.reference.q_d0));
  kv("amplitude", fmt(c.reference.amplitude));
  kv("periods", fmt(c.reference.periods));
  os << "\n[disturbance]\n";
  const auto& d = c.disturbance;
  kv("sin_amp", fmt(d.sin_amp));
  kv("sin_harmonic", fmt(d.sin_harmonic));
  kv("cos_amp", fmt(d.cos_amp));
  kv("cos_harmonic", fmt(d.cos_harmonic));
  kv("offset", fmt(d.offset));
  kv("omega_p", fmt(d.omega_p));
  if (d.pulse) {
    kv("pulse_onset", fmt(d.pulse->onset));
    kv("pulse_duration", fmt(d.pulse->duration));
    kv("pulse_amplitude", fmt(d.pulse->amplitude));
  }
  os << "\n[actuator]\n";
  kv("u_max", fmt(c.actuator.u_max));
  kv("u_min", fmt(c.actuator.u_min));
  os << "\n[rpf]\n";
  kv("rho_e0", fmt(c.rpf.base.rho_e0));
  kv("rho_einf", fmt(c.rpf.base.rho_einf));
  kv("l", fmt(c.rpf.base.l));
  kv("t2", fmt(c.rpf.base.t2));
  kv("g_inf", fmt(c.rpf.base.g_inf));
  kv("rho_from_error", c.rpf.rho_from_error ? "true" : "false");
  kv("rho_floor", fmt(c.rpf.rho_floor));
  kv("junction", c.rpf.junction == JunctionMode::smooth ? "smooth" : "automatic");
  os << "\n[constraint]\n";
  kv("b0", fmt(c.constraint.b0));
  os << "\n[shear]\n";
  kv("theta_deg", fmt(c.shear_deg));
  os << "\n[sappc]\n";
  kv("k_q", fmt(c.gains.k_q));
  kv("k_omega", fmt(c.gains.k_omega));
  kv("p", fmt(c.gains.p));
  kv("t1_gain", fmt(c.gains.t1_gain));
  kv("t2_gain", fmt(c.gains.t2_gain));
  kv("t3_gain", fmt(c.gains.t3_gain));
  kv("mu", fmt(c.gains.mu));
  kv("d_m", fmt(c.gains.d_m));
  kv("v_floor", fmt(c.gains.v_floor));
  os << "\n[trappc]\n";
  kv("k_const", fmt(c.trappc.k_const));
  if (c.trappc.rho_0) kv("rho_0", fmt(*c.trappc.rho_0));
  if (c.trappc.rho_inf) kv("rho_inf", fmt(*c.trappc.rho_inf));
  if (c.trappc.l) kv("l", fmt(*c.trappc.l));
  os << "\n[blfppc]\n";
  kv("k1", fmt(c.blf.gains.k1));
  kv("k2", fmt(c.blf.gains.k2));
  kv("k3", fmt(c.blf.gains.k3));
  kv("m", fmt(c.blf.m));
  kv("rho_tf", fmt(c.blf.rho_tf));
  kv("t_f", fmt(c.blf.t_f));
  kv("rho_scale", fmt(c.blf.rho_scale));
  kv("rho_floor", fmt(c.blf.rho_floor));
  os << "\n[campaign]\n";
  kv("n_runs", std::to_string(c.campaign.n_runs));
  kv("euler_range_deg", fmt(c.campaign.euler_range_deg));
  kv("threads", std::to_string(c.campaign.threads));
  kv("write_trajectories", c.campaign.write_trajectories ? "true" : "false");
  return os.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sappc
