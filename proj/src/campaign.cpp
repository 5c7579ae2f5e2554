#include "sappc/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace sappc {

std::uint64_t run_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

Quaternion euler_zyx(double yaw, double pitch, double roll) {
  return Quaternion(Eigen::AngleAxisd(yaw, Vector3::UnitZ()) * Eigen::AngleAxisd(pitch, Vector3::UnitY()) *
                    Eigen::AngleAxisd(roll, Vector3::UnitX()))
      .normalized();
}

AttitudeSample sample_initial_attitude(std::uint64_t seed, double range_deg) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-range_deg, range_deg);
  AttitudeSample s;
  for (int i = 0; i < 3; ++i) s.euler_deg(i) = angle(rng);
  const Vector3 rad = s.euler_deg * (std::numbers::pi / 180.0);
  s.q = euler_zyx(rad(0), rad(1), rad(2));
  return s;
}

CampaignConfig CampaignConfig::from_scenario(const ScenarioConfig& cfg) {
  CampaignConfig c;
  c.base = cfg;
  c.n_runs = cfg.campaign.n_runs;
  c.euler_range_deg = cfg.campaign.euler_range_deg;
  c.master_seed = cfg.sim.seed;
  c.threads = cfg.campaign.threads;
  return c;
}

void CampaignConfig::validate() const {
  if (n_runs < 1) throw ValidationError("campaign.n_runs", "must be >= 1");
  if (!(euler_range_deg > 0.0 && euler_range_deg < 90.0))
    throw ValidationError("campaign.euler_range_deg", "must lie in (0, 90)");
  base.validate();
}

Summary summarize(std::vector<double> v) {
  Summary s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
  };
  s.max = v.back();
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  s.p50 = rank(0.50);
  s.p95 = rank(0.95);
  s.p99 = rank(0.99);
  return s;
}

int effective_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SAPPC_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

CampaignStats run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  CampaignStats stats;
  stats.runs.resize(static_cast<std::size_t>(cfg.n_runs));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < stats.runs.size(); i = next++) {
      RunRecord& rec = stats.runs[i];
      rec.index = i;
      rec.seed = run_seed(cfg.master_seed, i);
      const AttitudeSample a = sample_initial_attitude(rec.seed, cfg.euler_range_deg);
      rec.euler_deg = a.euler_deg;
      ScenarioConfig sc = cfg.base;
      sc.q_s0 = a.q;
      sc.sim.seed = rec.seed;
      try {
        const RunResult res = run_scenario(sc);
        rec.metrics = res.metrics;
        if (!cfg.trajectory_dir.empty()) {
          char name[32];
          std::snprintf(name, sizeof name, "/run_%04zu.csv", i);
          write_trajectory_csv(res.log, cfg.trajectory_dir + name);
        }
      } catch (const NonFiniteState& e) {
        rec.failed = true;
        rec.non_finite = true;
        rec.error = e.what();
      } catch (const Error& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  };

  const int n_threads = std::min(effective_threads(cfg.threads), cfg.n_runs);
  std::vector<std::thread> pool;
  for (int k = 1; k < n_threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<double> dev, term;
  for (const RunRecord& r : stats.runs) {
    if (r.failed) {
      ++stats.failures;
      if (r.non_finite) ++stats.non_finite_aborts;
      continue;
    }
    dev.push_back(r.metrics.rpf_deviation_at_t2);
    term.push_back(r.metrics.terminal_error);
  }
  stats.deviation = summarize(std::move(dev));
  stats.terminal = summarize(std::move(term));
  return stats;
}

std::vector<std::string> campaign_columns() {
  std::vector<std::string> cols{"run", "seed", "yaw_deg", "pitch_deg", "roll_deg"};
  for (const auto& c : metrics_columns()) cols.push_back(c);
  cols.push_back("failed");
  cols.push_back("error");
  return cols;
}

void write_campaign_csv(const CampaignStats& stats, std::ostream& os) {
  const auto cols = campaign_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  char buf[160];
  for (const RunRecord& r : stats.runs) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.9g,%.9g,%.9g,", r.index, static_cast<unsigned long long>(r.seed),
                  r.euler_deg(0), r.euler_deg(1), r.euler_deg(2));
    os << buf;
    if (r.failed)
      os << ",,,,,,1,\"" << r.error << "\"\n";
    else {
      std::string line;
      std::ostringstream tmp;
      write_metrics_row(r.metrics, tmp);
      line = tmp.str();
      line.pop_back();
      os << line << ",0,\n";
    }
  }
}

void write_campaign_summary(const CampaignStats& stats, std::ostream& os) {
  char buf[200];
  os << "quantity,max,mean,p50,p95,p99\n";
  for (const auto& [name, s] : {std::pair{"rpf_deviation_at_t2", stats.deviation}, {"terminal_error", stats.terminal}}) {
    std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g,%.9g,%.9g\n", name, s.max, s.mean, s.p50, s.p95, s.p99);
    os << buf;
  }
  os << "runs," << stats.runs.size() << "\nfailures," << stats.failures << "\nnon_finite_aborts,"
     << stats.non_finite_aborts << "\n";
}

}  // namespace sappc
