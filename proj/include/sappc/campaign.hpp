#pragma once

// Monte-Carlo campaign over random initial attitudes.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sappc/scenario.hpp"
#include "sappc/sim.hpp"

namespace sappc {

/// SplitMix64 output for (master, index); independent of evaluation order.
std::uint64_t run_seed(std::uint64_t master, std::uint64_t index);

/// Z-Y-X (yaw, pitch, roll) composition, angles in radians.
Quaternion euler_zyx(double yaw, double pitch, double roll);

struct AttitudeSample {
  Vector3 euler_deg;  // yaw, pitch, roll
  Quaternion q;
};

/// Three angles uniform on [-range_deg, range_deg] composed Z-Y-X.
AttitudeSample sample_initial_attitude(std::uint64_t seed, double range_deg);

struct CampaignConfig {
  ScenarioConfig base;
  int n_runs = 200;
  double euler_range_deg = 85.0;
  std::uint64_t master_seed = 0;
  int threads = 0;
  std::string trajectory_dir;  // per-run CSVs when non-empty

  static CampaignConfig from_scenario(const ScenarioConfig& cfg);
  void validate() const;
};

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Vector3 euler_deg = Vector3::Zero();
  RunMetrics metrics;
  bool failed = false;
  bool non_finite = false;
  std::string error;
};

struct Summary {
  double max = 0.0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
};

struct CampaignStats {
  std::vector<RunRecord> runs;
  Summary deviation;  // rpf_deviation_at_t2 over completed runs
  Summary terminal;   // terminal_error over completed runs
  int failures = 0;
  int non_finite_aborts = 0;
};

/// Nearest-rank summary; zeros for an empty sample.
Summary summarize(std::vector<double> values);

/// min(requested or hardware concurrency, SAPPC_LAB_THREADS if set), at least 1.
int effective_threads(int requested);

CampaignStats run_campaign(const CampaignConfig& cfg);

/// Header of the per-run campaign CSV.
std::vector<std::string> campaign_columns();
void write_campaign_csv(const CampaignStats& stats, std::ostream& os);
void write_campaign_summary(const CampaignStats& stats, std::ostream& os);

}  // namespace sappc
