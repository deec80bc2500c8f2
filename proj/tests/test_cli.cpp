#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facet/cli.hpp"
#include "facet/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using facet::io::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = facet::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Scratch directory shared by the file-based cases.
std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "facet_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = scratch() / name;
  std::ofstream(path) << content;
  return path.string();
}

json payload_of(const RunResult& r) {
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  CHECK(doc.at("tool") == "facet");
  CHECK(doc.at("version") == "0.1.0");
  return doc.at("payload");
}

}  // namespace

TEST_CASE("version and help exit cleanly") {
  const RunResult version = run_cli({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out.find("facet 0.1.0") != std::string::npos);

  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"zfs", "--help"}).code == 0);
  CHECK(run_cli({"zfs", "levels", "--help"}).code == 0);
}

TEST_CASE("usage problems exit with 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"no-such-command"}).code == 2);
  CHECK(run_cli({"zfs", "levels"}).code == 2);          // missing required --d
  CHECK(run_cli({"zfs", "levels", "--d"}).code == 2);   // missing value
  CHECK(run_cli({"corr", "mm", "--q", "1", "--L", "x"}).code == 2);
  CHECK(run_cli({"--format", "yaml", "zfs", "levels", "--d", "1"}).code == 2);
  const RunResult r = run_cli({"zfs", "levels", "--bogus"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("domain failures exit with 1") {
  const RunResult r =
      run_cli({"corr", "mm", "--q", "1", "--L", "10", "--eps-r", "0.5"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error:", 0) == 0);
  CHECK(r.out.empty());

  CHECK(run_cli({"zfs", "levels", "--d", "1.0", "--e", "0.9"}).code == 1);
}

TEST_CASE("missing and malformed input files exit with 2") {
  const RunResult missing = run_cli({"optics", "eval", "--in", "/nonexistent.json"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  const std::string bad = write_temp("bad_transitions.json", "{\"transitions\": oops");
  const RunResult malformed = run_cli({"optics", "eval", "--in", bad});
  CHECK(malformed.code == 2);
  CHECK(malformed.err.find(bad) != std::string::npos);  // located diagnostic
}

TEST_CASE("triplet levels through the CLI") {
  const json payload = payload_of(
      run_cli({"--format", "json", "zfs", "levels", "--d", "2.88", "--e", "0.04"}));
  CHECK(payload.at("d_ghz") == 2.88);
  const auto transitions = payload.at("transitions_ghz");
  REQUIRE(transitions.size() == 2);
  CHECK(transitions[0].get<double>() == doctest::Approx(2.84).epsilon(1e-12));
  CHECK(transitions[1].get<double>() == doctest::Approx(2.92).epsilon(1e-12));
}

TEST_CASE("text and json render the same numbers") {
  const std::vector<std::string> base = {"corr", "mm", "--q", "2", "--L", "14.2710"};
  std::vector<std::string> json_args = {"--format", "json"};
  json_args.insert(json_args.end(), base.begin(), base.end());

  const json payload = payload_of(run_cli(json_args));
  const double e_mm = payload.at("e_mm_ev").get<double>();
  CHECK(e_mm == doctest::Approx(1.0062858021339627).epsilon(1e-12));

  const RunResult text = run_cli(base);
  CHECK(text.code == 0);
  CHECK(text.out.find(facet::io::format_double(e_mm)) != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
  const std::vector<std::string> args = {"--format", "json", "thermo",
                                         "ladder", "--delta-e-ct", "1.39"};
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const json payload = json::parse(a.out).at("payload");
  CHECK(payload.at("ie_plus_cbm_ev").get<double>() == doctest::Approx(4.48));
  CHECK(payload.at("ea_minus_vbm_ev").get<double>() == doctest::Approx(1.02));
}

TEST_CASE("config file values sit between defaults and flags") {
  const std::string config = write_temp("facet.conf",
                                        "# test config\n"
                                        "eps_r = 2.0\n"
                                        "anchor = 3.00\n");

  // Default (no config): eps_r = 5.69.
  const json def = payload_of(
      run_cli({"--format", "json", "corr", "mm", "--q", "1", "--L", "10"}));
  CHECK(def.at("eps_r").get<double>() == doctest::Approx(5.69));

  // Config overrides the default.
  const json cfg = payload_of(run_cli({"--config", config, "--format", "json",
                                       "corr", "mm", "--q", "1", "--L", "10"}));
  CHECK(cfg.at("eps_r").get<double>() == doctest::Approx(2.0));

  // Flag overrides the config.
  const json flag = payload_of(
      run_cli({"--config", config, "--format", "json", "corr", "mm", "--q", "1",
               "--L", "10", "--eps-r", "4.0"}));
  CHECK(flag.at("eps_r").get<double>() == doctest::Approx(4.0));

  // The anchor key feeds the thermo ladder the same way.
  const json ladder = payload_of(run_cli({"--config", config, "--format", "json",
                                          "thermo", "ladder", "--delta-e-ct", "1.39"}));
  CHECK(ladder.at("ie_plus_cbm_ev").get<double>() == doctest::Approx(4.39));
}

TEST_CASE("FACET_CONFIG supplies the config path") {
  const std::string config = write_temp("facet_env.conf", "eps_r = 3.0\n");
  setenv("FACET_CONFIG", config.c_str(), 1);
  const json payload = payload_of(
      run_cli({"--format", "json", "corr", "mm", "--q", "1", "--L", "10"}));
  unsetenv("FACET_CONFIG");
  CHECK(payload.at("eps_r").get<double>() == doctest::Approx(3.0));
}

TEST_CASE("config parse problems are located and exit with 2") {
  const std::string config = write_temp("broken.conf", "eps_r = yes\n");
  const RunResult r = run_cli(
      {"--config", config, "corr", "mm", "--q", "1", "--L", "10"});
  CHECK(r.code == 2);
  CHECK(r.err.find(config) != std::string::npos);
  CHECK(r.err.find(":1:") != std::string::npos);

  const RunResult missing = run_cli(
      {"--config", "/no/such/config", "corr", "mm", "--q", "1", "--L", "10"});
  CHECK(missing.code == 2);
}

TEST_CASE("grid moments are thread-count invariant through the CLI") {
  facet::VolumetricGrid g =
      facet::VolumetricGrid::zeros(facet::UnitCell::cubic(6.0), {12, 12, 12});
  for (std::size_t k = 0; k < g.size(); ++k)
    g.data[k] = 0.01 * static_cast<double>(k % 37) - 0.1;
  const std::string grid = write_temp("moments.grid", facet::io::write_simple_grid(g));

  const std::vector<std::string> base = {"--format", "json", "corr",     "moments",
                                         "--grid",  grid,   "--origin", "3,3,3"};
  std::vector<std::string> one = base;
  one.insert(one.begin(), {"--threads", "1"});
  std::vector<std::string> eight = base;
  eight.insert(eight.begin(), {"--threads", "8"});

  const RunResult r1 = run_cli(one);
  const RunResult r8 = run_cli(eight);
  CHECK(r1.code == 0);
  CHECK(r1.out == r8.out);
}

TEST_CASE("irrep product and state label through the CLI") {
  const json product = payload_of(
      run_cli({"--format", "json", "sym", "product", "--group", "C2v", "B1", "B2"}));
  CHECK(product.at("product") == "A2");

  const json label = payload_of(run_cli({"--format", "json", "sym", "label",
                                         "--group", "C2v", "--orbital", "B2:1",
                                         "--orbital", "A1:1", "--spin", "1"}));
  CHECK(label.at("term") == "3B2");
}

TEST_CASE("lattice build writes a parseable structure") {
  const auto out = (scratch() / "cell.poscar").string();
  const RunResult r = run_cli({"lattice", "build", "--n1", "2", "--n2", "2",
                               "--n3", "2", "-o", out});
  CHECK(r.code == 0);
  const facet::Structure s =
      facet::io::parse_poscar(facet::io::read_file(out), out);
  CHECK(s.size() == 64);

  const json direct = payload_of(run_cli({"--format", "json", "lattice", "build",
                                          "--n1", "1", "--n2", "1", "--n3", "1"}));
  CHECK(direct.at("sites") == 8);
}

TEST_CASE("unknown config keys are rejected") {
  const std::string config = write_temp("unknown.conf", "warp_speed = 9\n");
  const RunResult r = run_cli(
      {"--config", config, "corr", "mm", "--q", "1", "--L", "10"});
  CHECK(r.code == 2);
}
