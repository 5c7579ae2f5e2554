// Acceptance suite: one PASS/FAIL line per criterion, with the measured numbers.
//
// Usage: sappc_acceptance [--known-failure NAME]...
// Exit status is 0 when every criterion passes or fails only among the named
// known failures; their FAIL lines are printed unchanged.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "sappc/campaign.hpp"
#include "sappc/checks.hpp"
#include "sappc/config.hpp"
#include "sappc/sim.hpp"

using namespace sappc;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ScenarioConfig config(const char* name) { return load_config(std::string(SAPPC_CONFIG_DIR "/") + name + ".cfg"); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Nominal run shared by the first three criteria.
struct Nominal {
  RunResult run;
  double seconds = 0.0;
};

const Nominal& nominal() {
  static const Nominal n = [] {
    const ScenarioConfig cfg = config("nominal");
    const auto t0 = Clock::now();
    Nominal r{run_scenario(cfg), 0.0};
    r.seconds = seconds_since(t0);
    return r;
  }();
  return n;
}

Verdict nominal_tracking() {
  const Nominal& n = nominal();
  const RunMetrics& m = n.run.metrics;
  const bool ok = m.settling_error <= 1e-3 && m.terminal_error <= 1.1e-4 && m.terminal_error <= 1e-4 && n.seconds < 5.0;
  return {ok, fmt("settling %.3e (<= 1e-3), terminal %.3e (<= 1e-4), %.2f s (< 5 s)", m.settling_error,
                  m.terminal_error, n.seconds)};
}

Verdict rpf_deviation() {
  const RunMetrics& m = nominal().run.metrics;
  return {m.rpf_deviation_at_t2 <= 1e-4, fmt("max |q_ev - rho| at t2 = %.3e (<= 1e-4)", m.rpf_deviation_at_t2)};
}

Verdict containment() {
  const RunMetrics& m = nominal().run.metrics;
  return {m.containment_fraction >= 0.99, fmt("post-capture fraction inside %.4f (>= 0.99)", m.containment_fraction)};
}

struct Controlled {
  RunResult run;
  std::string name;
};

Verdict comparison() {
  ScenarioConfig cfg = config("comparison");
  const auto t0 = Clock::now();
  std::vector<Controlled> runs;
  for (ControllerKind k : {ControllerKind::sappc, ControllerKind::trappc, ControllerKind::blfppc}) {
    cfg.sim.controller = k;
    runs.push_back({run_scenario(cfg, true), to_string(k)});
  }
  const double secs = seconds_since(t0);
  for (const auto& r : runs)
    if (!r.run.abort_reason.empty()) return {false, r.name + " aborted: " + r.run.abort_reason};
  const RunMetrics &s = runs[0].run.metrics, &t = runs[1].run.metrics, &b = runs[2].run.metrics;
  const bool below_blf = s.terminal_error < b.terminal_error;
  const bool below_tra = s.terminal_error < t.terminal_error;
  const bool ok = below_blf && below_tra && t.reference_crossings >= 1 && s.reference_crossings == 0 && secs < 15.0;
  return {ok, fmt("terminal sappc %.3e, trappc %.3e, blfppc %.3e (sappc lowest: %s); crossings sappc %d (== 0), "
                  "trappc %d (>= 1); %.2f s (< 15 s)",
                  s.terminal_error, t.terminal_error, b.terminal_error, below_blf && below_tra ? "yes" : "no",
                  s.reference_crossings, t.reference_crossings, secs)};
}

Verdict pulse() {
  ScenarioConfig cfg = config("pulse");
  const auto t0 = Clock::now();
  cfg.sim.controller = ControllerKind::sappc;
  const RunResult s = run_scenario(cfg, true);
  cfg.sim.controller = ControllerKind::blfppc;
  const RunResult b = run_scenario(cfg, true);
  const double secs = seconds_since(t0);
  if (!s.abort_reason.empty()) return {false, "sappc aborted: " + s.abort_reason};
  // An aborted barrier run never comes back either.
  const bool blf_stuck = !b.abort_reason.empty() || !b.metrics.recovered_after_pulse;
  const bool ok = s.metrics.recovered_after_pulse && blf_stuck && secs < 10.0;
  return {ok, fmt("sappc recovered %s, blfppc recovered %s (final |q_ev| %.3e); %.2f s (< 10 s)",
                  s.metrics.recovered_after_pulse ? "yes" : "no", blf_stuck ? "no" : "yes",
                  b.abort_reason.empty() ? b.metrics.terminal_error : 0.0, secs)};
}

Verdict monte_carlo() {
  CampaignConfig cc = CampaignConfig::from_scenario(config("campaign"));
  cc.n_runs = 200;
  cc.threads = 8;
  const auto t0 = Clock::now();
  const CampaignStats st = run_campaign(cc);
  const double secs = seconds_since(t0);
  int dev_viol = 0, term_viol = 0;
  for (const RunRecord& r : st.runs) {
    if (r.failed) continue;
    dev_viol += r.metrics.rpf_deviation_at_t2 >= 1e-4;
    term_viol += r.metrics.terminal_error > 5e-5;
  }
  const bool ok = st.runs.size() == 200 && st.failures == 0 && st.non_finite_aborts == 0 && dev_viol == 0 &&
                  term_viol <= 4 && secs < 180.0;
  return {ok, fmt("200 runs on %d threads: deviation max %.3e (%d >= 1e-4), terminal max %.3e (%d > 5e-5, <= 4 "
                  "allowed), %d failed, %d non-finite; %.1f s (< 180 s)",
                  std::min(effective_threads(cc.threads), cc.n_runs), st.deviation.max, dev_viol, st.terminal.max,
                  term_viol, st.failures, st.non_finite_aborts, secs)};
}

Verdict oracle() {
  const auto t0 = Clock::now();
  const CheckResult r = check_settling_oracle();
  const double secs = seconds_since(t0);
  return {r.passed && secs < 1.0, fmt("%s; %.3f s (< 1 s)", r.detail.c_str(), secs)};
}

Verdict properties() {
  const ScenarioConfig cfg = config("nominal");
  std::string failed;
  std::size_t n = 0;
  for (const CheckResult& r : run_all_checks(&cfg)) {
    ++n;
    if (!r.passed) failed += (failed.empty() ? "" : "; ") + r.name + ": " + r.detail;
  }
  return {failed.empty(), failed.empty() ? fmt("%zu suites passed", n) : failed};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> known;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc) {
      known.insert(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure NAME]...\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"nominal_tracking", nominal_tracking},
      {"rpf_deviation", rpf_deviation},
      {"constraint_containment", containment},
      {"comparison_ordering", comparison},
      {"singularity_recovery", pulse},
      {"monte_carlo", monte_carlo},
      {"settling_oracle", oracle},
      {"property_suites", properties},
  };

  int unexpected = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const bool expected_fail = known.count(name) > 0;
    std::printf("%s %-24s %s%s\n", v.passed ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                !v.passed && expected_fail ? " [known failure]" : "");
    std::fflush(stdout);
    if (!v.passed && !expected_fail) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
