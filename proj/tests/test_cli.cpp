#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(BSQZ_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string config(const char* name) { return std::string(BSQZ_CONFIG_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                           "/bsqz_cli_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("point reports the squeezing at point D", "[cli]") {
  const Run r = run("point --config " + config("point_d.yaml"));
  CHECK(r.code == 0);
  CHECK(r.out.find("stable: true") != std::string::npos);
  CHECK(r.out.find("variance_db: 3.89") != std::string::npos);

  const Run s = run("point --set G_b=0.124 --set G_c=0.15");
  CHECK(s.code == 0);
  CHECK(s.out.find("variance_db: 3.89") != std::string::npos);
}

TEST_CASE("bad input exits with code 2", "[cli]") {
  CHECK(run("point --set G_x=1").code == 2);
  CHECK(run("point --set G_c").code == 2);
  CHECK(run("point --set G_c=abc").code == 2);
  CHECK(run("point --set kappa_1=-1").code == 2);
  CHECK(run("preset fig9").code == 2);
  CHECK(run("sweep --config /nonexistent.yaml").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("").code == 2);
  const std::string bad = write_temp("bad.yaml", "axes: [{name: G_q, min: 0, max: 1, count: 3}]\n");
  CHECK(run("sweep --config " + bad).code == 2);
}

TEST_CASE("numerical failures exit with code 3", "[cli]") {
  const std::string blue = write_temp(
      "blue.yaml",
      "series: [{label: blue, set: {Delta_1: -3.4728, G_b: 0}}]\n"
      "axes: [{name: G_c, min: 0.14, max: 0.16, count: 5}]\n");
  CHECK(run("optimize --config " + blue).code == 3);
}

TEST_CASE("sweep writes metadata and rows", "[cli]") {
  const Run r = run("sweep --threads 2 --config " + config("fig3a_slice.yaml"));
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# tool: bsqz", 0) == 0);
  std::istringstream in(r.out);
  std::string line;
  int data = 0;
  while (std::getline(in, line)) data += line[0] == '#' ? 0 : 1;
  CHECK(data == 1 + 3 * 61);
}

TEST_CASE("stability and optimize subcommands", "[cli]") {
  const Run s = run("stability --config " + config("stability_blue.yaml"));
  REQUIRE(s.code == 0);
  CHECK(s.out.find("series,G_c,gamma_b,stable,spectral_abscissa") != std::string::npos);
  CHECK(s.out.find(",false,") != std::string::npos);

  const Run o = run("optimize --config " + config("optimize_gb.yaml"));
  REQUIRE(o.code == 0);
  CHECK(o.out.find("G_b: 0.12") != std::string::npos);
}
