#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include <doctest.h>

#include "sappc/errors.hpp"

#include "sappc/config.hpp"

using namespace sappc;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

template <typename E>
std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_config(in, "inline");
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

std::string nominal_with(const std::string& section, const std::string& line) {
  std::string text = read_file(SAPPC_CONFIG_DIR "/nominal.cfg");
  const std::string head = "[" + section + "]\n";
  const auto pos = text.find(head);
  REQUIRE(pos != std::string::npos);
  return text.insert(pos + head.size(), line + "\n");
}

std::string nominal_replacing(const std::string& key, const std::string& value) {
  const std::regex line("^" + key + "\\s*=.*$", std::regex::multiline);
  const std::string text = read_file(SAPPC_CONFIG_DIR "/nominal.cfg");
  REQUIRE(std::regex_search(text, line));
  return std::regex_replace(text, line, key + " = " + value);
}

}  // namespace

TEST_CASE("bundled nominal config") {
  const ScenarioConfig c = load_config(SAPPC_CONFIG_DIR "/nominal.cfg");
  CHECK(c.rpf.base.rho_e0 == 0.4);
  CHECK(c.rpf.base.l == 0.5);
  CHECK(c.rpf.base.t2 == 20.0);
  CHECK(c.rpf.base.g_inf == 3e-5);
  CHECK(c.inertia == Matrix3::Identity() * 4.0);
  CHECK(c.gains.p == 0.1);
  CHECK(c.gains.t1_gain == 3.0);
  CHECK(c.gains.t3_gain == 2.0);
  CHECK(c.shear_deg == 10.0);
  CHECK(c.reference.amplitude == doctest::Approx(0.573 * std::numbers::pi / 180.0).epsilon(1e-15));
}

TEST_CASE("every bundled config loads") {
  for (const char* name : {"nominal", "comparison", "pulse", "campaign"})
    CHECK_NOTHROW(load_config(std::string(SAPPC_CONFIG_DIR "/") + name + ".cfg"));
}

TEST_CASE("round trip") {
  for (const char* name : {"nominal", "comparison", "pulse", "campaign"}) {
    const ScenarioConfig a = load_config(std::string(SAPPC_CONFIG_DIR "/") + name + ".cfg");
    std::istringstream in(serialize_config(a));
    const ScenarioConfig b = parse_config(in, "serialized");
    CHECK(serialize_config(b) == serialize_config(a));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(b.rpf.base.g_inf == a.rpf.base.g_inf);
    CHECK(b.q_s0.coeffs() == a.q_s0.coeffs());
    CHECK(b.trappc.rho_inf == a.trappc.rho_inf);
  }
}

TEST_CASE("validation names the key") {
  CHECK(error_of<ValidationError>(nominal_replacing("rho_einf", "5e-5")).find("rpf.g_inf") != std::string::npos);
  CHECK(error_of<ValidationError>(nominal_replacing("t3_gain", "10")).find("sappc.t3_gain") != std::string::npos);
  CHECK(error_of<ValidationError>(nominal_with("sappc", "bogus = 1")).find("sappc.bogus") != std::string::npos);
  CHECK(error_of<ValidationError>("[nonsense]\nx = 1\n") != "");
  CHECK(error_of<ValidationError>(nominal_with("reference", "amplitude = 0.01")).find("amplitude") !=
        std::string::npos);
}

TEST_CASE("parse errors carry a location") {
  CHECK(error_of<ParseError>("[sim]\ndt 0.01\n").find("inline:2") != std::string::npos);
  CHECK(error_of<ParseError>(nominal_with("sim", "dt = fast")) != "");
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), Error);
}
