// sappc_lab: run scenarios, controller comparisons, the pulse test, Monte-Carlo
// campaigns and the self-check suites from scenario config files.
//
// Exit codes: 0 success, 1 bad input (usage, parse or validation error, failed
// self-check), 2 runtime abort (non-finite state, transform singularity, I/O).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sappc/campaign.hpp"
#include "sappc/checks.hpp"
#include "sappc/config.hpp"
#include "sappc/sim.hpp"

namespace fs = std::filesystem;
using namespace sappc;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> controller;
  bool quiet = false;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ScenarioConfig load(const Options& o) {
  if (o.config.empty()) throw InputError("--config is required");
  ScenarioConfig cfg = load_config(o.config);
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.dt) cfg.sim.dt = *o.dt;
  if (o.duration) cfg.sim.duration = *o.duration;
  if (o.controller) cfg.sim.controller = parse_controller_kind(*o.controller);
  if (o.runs) cfg.campaign.n_runs = *o.runs;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Options& o, const ScenarioConfig& cfg) {
  fs::path dir = !o.out.empty() ? o.out : !cfg.sim.output.empty() ? cfg.sim.output : "out";
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  return f;
}

nlohmann::json metadata(const std::string& command, const Options& o, const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["tool"] = "sappc_lab";
  j["version"] = SAPPC_LAB_VERSION;
  j["command"] = command;
  j["config_path"] = o.config;
  j["config_hash"] = config_hash(cfg);
  j["seed"] = cfg.sim.seed;
  j["scenario"] = to_string(cfg.sim.scenario);
  j["dt"] = cfg.sim.dt;
  j["duration"] = cfg.sim.duration;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
  j["compiler"] = __VERSION__;
#endif
  j["cxx_standard"] = __cplusplus;
  return j;
}

void write_json(const fs::path& p, const nlohmann::json& j) { open_out(p) << j.dump(2) << "\n"; }

void write_metrics(const fs::path& p, const RunMetrics& m) {
  auto f = open_out(p);
  const auto cols = metrics_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
  f << "\n";
  write_metrics_row(m, f);
}

nlohmann::json metrics_json(const RunMetrics& m) {
  return {{"settling_error", m.settling_error},
          {"terminal_error", m.terminal_error},
          {"rpf_deviation_at_t2", m.rpf_deviation_at_t2},
          {"containment_fraction", m.containment_fraction},
          {"recovered_after_pulse", m.recovered_after_pulse},
          {"reference_crossings", m.reference_crossings}};
}

void print_metrics(const std::string& label, const RunResult& r) {
  if (!r.abort_reason.empty()) {
    std::printf("%-8s aborted: %s (%zu rows logged)\n", label.c_str(), r.abort_reason.c_str(), r.log.rows.size());
    return;
  }
  const RunMetrics& m = r.metrics;
  std::printf("%-8s settling %.3e  terminal %.3e  deviation@t2 %.3e  containment %.4f  recovered %s  crossings %d\n",
              label.c_str(), m.settling_error, m.terminal_error, m.rpf_deviation_at_t2, m.containment_fraction,
              m.recovered_after_pulse ? "yes" : "no", m.reference_crossings);
}

// One controller over the shared scenario; writes trajectory_<tag>.csv and metrics_<tag>.csv.
RunResult run_one(const ScenarioConfig& cfg, const fs::path& dir, const std::string& tag) {
  RunResult r = run_scenario(cfg, true);
  const std::string suffix = tag.empty() ? "" : "_" + tag;
  write_trajectory_csv(r.log, (dir / ("trajectory" + suffix + ".csv")).string());
  if (r.abort_reason.empty()) write_metrics(dir / ("metrics" + suffix + ".csv"), r.metrics);
  return r;
}

void write_summary(const fs::path& p, const std::vector<std::pair<std::string, RunResult>>& runs) {
  auto f = open_out(p);
  f << "controller,status";
  for (const auto& c : metrics_columns()) f << "," << c;
  f << ",abort_reason\n";
  for (const auto& [name, r] : runs) {
    f << name << "," << (r.abort_reason.empty() ? "ok" : "aborted");
    if (r.abort_reason.empty()) {
      std::ostringstream row;
      write_metrics_row(r.metrics, row);
      std::string line = row.str();
      line.pop_back();
      f << "," << line << ",\n";
    } else {
      f << std::string(metrics_columns().size(), ',') << ",\"" << r.abort_reason << "\"\n";
    }
  }
}

int cmd_run(const Options& o) {
  const ScenarioConfig cfg = load(o);
  const fs::path dir = out_dir(o, cfg);
  const RunResult r = run_one(cfg, dir, "");
  auto meta = metadata("run", o, cfg);
  meta["controller"] = to_string(cfg.sim.controller);
  meta["status"] = r.abort_reason.empty() ? "ok" : "aborted";
  if (r.abort_reason.empty())
    meta["metrics"] = metrics_json(r.metrics);
  else
    meta["abort_reason"] = r.abort_reason;
  write_json(dir / "metadata.json", meta);
  open_out(dir / "config.cfg") << serialize_config(cfg);
  if (!o.quiet) print_metrics(to_string(cfg.sim.controller), r);
  if (!r.abort_reason.empty()) {
    std::cerr << "run aborted: " << r.abort_reason << "\n";
    return 2;
  }
  return 0;
}

// Runs each controller on the same scenario. A benchmark that aborts is
// reported in the summary; an abort of the SAPPC run is a runtime failure.
int cmd_multi(const Options& o, const std::string& command, const std::vector<ControllerKind>& kinds) {
  ScenarioConfig cfg = load(o);
  if (command == "pulse" && !cfg.disturbance.pulse)
    throw ValidationError("disturbance.pulse_amplitude", "the pulse command needs a configured pulse");
  const fs::path dir = out_dir(o, cfg);
  std::vector<std::pair<std::string, RunResult>> runs;
  auto meta = metadata(command, o, cfg);
  for (ControllerKind k : kinds) {
    cfg.sim.controller = k;
    const std::string name = to_string(k);
    runs.emplace_back(name, run_one(cfg, dir, name));
    const RunResult& r = runs.back().second;
    meta["runs"][name] = r.abort_reason.empty() ? metrics_json(r.metrics) : nlohmann::json{{"abort_reason", r.abort_reason}};
    if (!o.quiet) print_metrics(name, r);
  }
  write_summary(dir / (command == "pulse" ? "pulse_summary.csv" : "comparison_summary.csv"), runs);
  write_json(dir / "metadata.json", meta);
  open_out(dir / "config.cfg") << serialize_config(cfg);
  const RunResult& primary = runs.front().second;
  if (!primary.abort_reason.empty()) {
    std::cerr << command << ": sappc run aborted: " << primary.abort_reason << "\n";
    return 2;
  }
  return 0;
}

int cmd_campaign(const Options& o) {
  const ScenarioConfig cfg = load(o);
  const fs::path dir = out_dir(o, cfg);
  CampaignConfig cc = CampaignConfig::from_scenario(cfg);
  if (cfg.campaign.write_trajectories) {
    cc.trajectory_dir = (dir / "trajectories").string();
    fs::create_directories(cc.trajectory_dir);
  }
  const CampaignStats stats = run_campaign(cc);
  {
    auto f = open_out(dir / "campaign_runs.csv");
    write_campaign_csv(stats, f);
  }
  {
    auto f = open_out(dir / "campaign_summary.csv");
    write_campaign_summary(stats, f);
  }
  auto meta = metadata("campaign", o, cfg);
  meta["master_seed"] = cc.master_seed;
  meta["n_runs"] = cc.n_runs;
  meta["euler_range_deg"] = cc.euler_range_deg;
  meta["euler_convention"] = "Z-Y-X (yaw, pitch, roll), q = Rz(yaw) Ry(pitch) Rx(roll)";
  meta["threads"] = std::min(effective_threads(cc.threads), cc.n_runs);
  meta["failures"] = stats.failures;
  meta["non_finite_aborts"] = stats.non_finite_aborts;
  meta["rpf_deviation_at_t2"] = {{"max", stats.deviation.max}, {"p99", stats.deviation.p99}};
  meta["terminal_error"] = {{"max", stats.terminal.max}, {"p99", stats.terminal.p99}};
  write_json(dir / "metadata.json", meta);
  open_out(dir / "config.cfg") << serialize_config(cfg);
  if (!o.quiet) write_campaign_summary(stats, std::cout);
  return 0;
}

int cmd_check(const Options& o) {
  std::optional<ScenarioConfig> cfg;
  if (!o.config.empty()) cfg = load(o);
  bool ok = true;
  for (const CheckResult& r : run_all_checks(cfg ? &*cfg : nullptr, o.seed.value_or(1))) {
    ok = ok && r.passed;
    if (!o.quiet || !r.passed) std::printf("%s  %-26s %s\n", r.passed ? "ok  " : "FAIL", r.name.c_str(), r.detail.c_str());
  }
  return ok ? 0 : 1;
}

std::string full_schema() {
  std::string s = schema_text();
  s += "\ncampaign runs CSV (one row per run; metric fields empty when failed = 1)\n  ";
  const auto cols = campaign_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  s += "\n\ncampaign summary CSV\n  quantity,max,mean,p50,p95,p99 for rpf_deviation_at_t2 and terminal_error,\n"
       "  then runs, failures and non_finite_aborts rows\n";
  s += "\ncomparison_summary.csv / pulse_summary.csv\n  controller,status,";
  for (const auto& c : metrics_columns()) s += c + ",";
  s += "abort_reason\n";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAPPC attitude-tracking simulation lab"};
  app.require_subcommand(0, 1);
  Options o;
  bool schema = false;
  app.add_flag("--schema", schema, "Print the CSV output schema and exit");
  app.add_option("--config", o.config, "Scenario config file");
  app.add_option("--out", o.out, "Output directory (default: [sim] output, else ./out)");
  app.add_option("--seed", o.seed, "Seed (campaign master seed)");
  app.add_option("--runs", o.runs, "Campaign run count")->check(CLI::PositiveNumber);
  app.add_option("--dt", o.dt, "Integration step [s]");
  app.add_option("--duration", o.duration, "Run length [s]");
  app.add_option("--controller", o.controller, "sappc, trappc or blfppc (run only)");
  app.add_flag("--quiet", o.quiet, "Only print failures");

  auto* run = app.add_subcommand("run", "Single scenario: trajectory CSV, metrics, metadata");
  auto* compare = app.add_subcommand("compare", "SAPPC, TraPPC and BLFPPC on the same scenario");
  auto* pulse = app.add_subcommand("pulse", "Torque-pulse recovery test for SAPPC and BLFPPC");
  auto* campaign = app.add_subcommand("campaign", "Monte-Carlo over random initial attitudes");
  auto* check = app.add_subcommand("check", "Property and oracle self-checks");
  for (auto* sc : {run, compare, pulse, campaign, check}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (schema) {
      std::cout << full_schema();
      return 0;
    }
    if (*run) return cmd_run(o);
    if (*compare) return cmd_multi(o, "compare", {ControllerKind::sappc, ControllerKind::trappc, ControllerKind::blfppc});
    if (*pulse) return cmd_multi(o, "pulse", {ControllerKind::sappc, ControllerKind::blfppc});
    if (*campaign) return cmd_campaign(o);
    if (*check) return cmd_check(o);
    std::cerr << app.help();
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  } catch (const NonFiniteState& e) {
    std::cerr << "aborted: " << e.what() << " (last valid row " << e.last_valid_row() << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return 2;
  }
}
