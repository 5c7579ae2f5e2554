#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "sappc/errors.hpp"

#include "sappc/campaign.hpp"
#include "sappc/config.hpp"

using namespace sappc;

TEST_CASE("z-y-x composition") {
  CHECK(euler_zyx(0, 0, 0).coeffs() == Quaternion::Identity().coeffs());
  const double a = 85.0 * std::numbers::pi / 180.0;
  const Quaternion q = euler_zyx(a, 0, 0);
  CHECK(q.norm() == doctest::Approx(1.0).epsilon(1e-15));
  const Eigen::AngleAxisd aa(q);
  CHECK(aa.angle() == doctest::Approx(a).epsilon(1e-14));
  CHECK((aa.axis() - Vector3::UnitZ()).norm() < 1e-14);

  // Oracle: the same product built from Eigen's angle-axis factors.
  const Quaternion ref = Eigen::AngleAxisd(0.3, Vector3::UnitZ()) * Eigen::AngleAxisd(-0.2, Vector3::UnitY()) *
                         Eigen::AngleAxisd(0.7, Vector3::UnitX());
  CHECK(std::min((euler_zyx(0.3, -0.2, 0.7).coeffs() - ref.coeffs()).norm(),
                 (euler_zyx(0.3, -0.2, 0.7).coeffs() + ref.coeffs()).norm()) < 1e-14);
}

TEST_CASE("per-run seeds") {
  CHECK(run_seed(1, 0) != run_seed(1, 1));
  CHECK(run_seed(1, 5) == run_seed(1, 5));
  CHECK(run_seed(1, 5) != run_seed(2, 5));
}

TEST_CASE("sampled angles are uniform") {
  constexpr int n = 100000;
  std::vector<double> yaw(n);
  for (int k = 0; k < n; ++k) {
    const AttitudeSample s = sample_initial_attitude(run_seed(42, k), 85.0);
    CHECK(std::abs(s.q.norm() - 1.0) < 1e-14);
    yaw[k] = s.euler_deg(0);
  }
  std::sort(yaw.begin(), yaw.end());
  CHECK(yaw.front() >= -85.0);
  CHECK(yaw.back() <= 85.0);
  double d = 0.0;
  for (int k = 0; k < n; ++k) {
    const double cdf = (yaw[k] + 85.0) / 170.0;
    d = std::max({d, std::abs(cdf - double(k) / n), std::abs(cdf - double(k + 1) / n)});
  }
  // Kolmogorov-Smirnov critical value at alpha = 0.01.
  CHECK(d < 1.628 / std::sqrt(double(n)));
}

TEST_CASE("summary statistics") {
  const Summary s = summarize({5, 1, 4, 2, 3});
  CHECK(s.max == 5.0);
  CHECK(s.mean == 3.0);
  CHECK(s.p50 == 3.0);
  CHECK(s.p99 == 5.0);
  CHECK(summarize({}).max == 0.0);
}

TEST_CASE("thread cap from the environment") {
  setenv("SAPPC_LAB_THREADS", "2", 1);
  CHECK(effective_threads(8) == 2);
  CHECK(effective_threads(1) == 1);
  unsetenv("SAPPC_LAB_THREADS");
  CHECK(effective_threads(3) == 3);
  CHECK(effective_threads(0) >= 1);
}

TEST_CASE("campaign results do not depend on the thread count") {
  CampaignConfig cc = CampaignConfig::from_scenario(load_config(SAPPC_CONFIG_DIR "/campaign.cfg"));
  cc.n_runs = 8;
  cc.base.sim.duration = 25.0;
  cc.master_seed = 99;
  cc.threads = 1;
  const CampaignStats one = run_campaign(cc);
  cc.threads = 8;
  const CampaignStats eight = run_campaign(cc);
  REQUIRE(one.runs.size() == 8);
  REQUIRE(eight.runs.size() == 8);
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(one.runs[k].seed == eight.runs[k].seed);
    CHECK(one.runs[k].euler_deg == eight.runs[k].euler_deg);
    CHECK(one.runs[k].metrics.terminal_error == eight.runs[k].metrics.terminal_error);
    CHECK(one.runs[k].metrics.rpf_deviation_at_t2 == eight.runs[k].metrics.rpf_deviation_at_t2);
    CHECK_FALSE(one.runs[k].failed);
  }
  CHECK(one.deviation.max == eight.deviation.max);
  std::ostringstream a, b;
  write_campaign_csv(one, a);
  write_campaign_csv(eight, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("zero initial attitude settles trivially") {
  ScenarioConfig cfg = load_config(SAPPC_CONFIG_DIR "/campaign.cfg");
  cfg.q_s0 = Quaternion::Identity();
  cfg.sim.duration = 25.0;
  const RunResult r = run_scenario(cfg);
  CHECK(r.metrics.rpf_deviation_at_t2 < 1e-4);
}

TEST_CASE("campaign validation") {
  CampaignConfig cc;
  cc.n_runs = 0;
  CHECK_THROWS_AS(cc.validate(), ValidationError);
  cc.n_runs = 1;
  cc.euler_range_deg = 90.0;
  CHECK_THROWS_AS(cc.validate(), ValidationError);
}
