#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "gravitom/bulakh.hpp"
#include "gravitom/detect.hpp"
#include "gravitom/field.hpp"
#include "gravitom/grid.hpp"
#include "gravitom/survey.hpp"
#include "test_util.hpp"

using namespace gravitom;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("\"") + GRAVITOM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_example_inputs(const TempDir& dir) {
  Deposit truth;
  truth.bodies.push_back({5.7, 5.3, 4.2, 2.648211801821842, 0.51, 1.6});
  truth.bodies.push_back({10.7, 11.1, 3.8, 1.324062675962944, 1.96, 2.6});
  write_deposit(dir.file("truth.dep"), truth);

  std::ofstream cfg(dir.file("pipeline.conf"));
  cfg << "# gravitom config v1\n"
      << "refine.max_sweeps = 40\n"
      << "box.1.eps = 0.2 0.6\n"
      << "box.1.rho = 1.1 1.7\n"
      << "box.1.x0 = 5.4 6.0\n"
      << "box.1.y0 = 5.2 6.0\n"
      << "box.1.z0 = 4.0 5.8\n"
      << "box.2.eps = 1.8 2.2\n"
      << "box.2.rho = 2.3 2.9\n"
      << "box.2.x0 = 10.3 11.0\n"
      << "box.2.y0 = 10.2 12.0\n"
      << "box.2.z0 = 2.3 4.3\n";
}

}  // namespace

TEST_CASE("staged subcommands compose into the same result as the "
          "end-to-end pipeline") {
  TempDir dir("cli");
  write_example_inputs(dir);
  const std::string conf = " --config " + dir.file("pipeline.conf");

  // Synthesize a clean survey over a jittered lattice.
  REQUIRE(run_cli("synth --truth " + dir.file("truth.dep") +
                  " --lattice 7 7 --extent 0 14 0 14 --sigma 0 --seed 1"
                  " --out " + dir.file("survey.txt") +
                  " --stations-out " + dir.file("stations.txt")) == 0);
  const Survey survey = read_survey(dir.file("survey.txt"));
  CHECK(survey.samples.size() == 45);
  CHECK(read_stations(dir.file("stations.txt")).size() == 45);

  // Stage by stage.
  REQUIRE(run_cli("detect --survey " + dir.file("survey.txt") + conf +
                  " --grid-out " + dir.file("grid.txt") +
                  " --out " + dir.file("det.txt")) == 0);
  const DetectionReport det = read_detection(dir.file("det.txt"));
  REQUIRE(det.body_pole.size() == 2);
  CHECK_NOTHROW(read_grid(dir.file("grid.txt")).validate());

  REQUIRE(run_cli("estimate --survey " + dir.file("survey.txt") +
                  " --detection " + dir.file("det.txt") + conf +
                  " --out " + dir.file("est.txt")) == 0);
  const auto estimates = read_estimates(dir.file("est.txt"));
  REQUIRE(estimates.size() == 2);
  for (const BodyEstimate& e : estimates) {
    CHECK(e.z0 > 0.0);
    CHECK(e.mass > 0.0);
    CHECK(e.used_probes > 0);
  }

  REQUIRE(run_cli("invert --survey " + dir.file("survey.txt") +
                  " --detection " + dir.file("det.txt") +
                  " --estimates " + dir.file("est.txt") + conf +
                  " --out " + dir.file("report_staged.txt")) == 0);

  // End to end, twice: deterministic and identical to the staged run.
  REQUIRE(run_cli("pipeline --survey " + dir.file("survey.txt") + conf +
                  " --out " + dir.file("report_a.txt")) == 0);
  REQUIRE(run_cli("pipeline --survey " + dir.file("survey.txt") + conf +
                  " --out " + dir.file("report_b.txt")) == 0);
  const std::string staged = slurp(dir.file("report_staged.txt"));
  const std::string a = slurp(dir.file("report_a.txt"));
  CHECK(a == slurp(dir.file("report_b.txt")));
  CHECK(a == staged);
  CHECK(a.find("bodies 2\n") != std::string::npos);
  CHECK(a.find("body 2 solution ") != std::string::npos);

  // Contours from the interpolated grid.
  REQUIRE(run_cli("contours --grid " + dir.file("grid.txt") +
                  " --levels 5 10 --out " + dir.file("cont.txt")) == 0);
  CHECK(slurp(dir.file("cont.txt")).rfind("# gravitom contours v1\n", 0) == 0);
}

TEST_CASE("forward subcommand writes a dense field grid") {
  TempDir dir("cli_forward");
  write_example_inputs(dir);
  REQUIRE(run_cli("forward --truth " + dir.file("truth.dep") +
                  " --extent 0 14 0 14 --nx 15 --ny 15 --out " +
                  dir.file("field.grid")) == 0);
  const FieldGrid g = read_grid(dir.file("field.grid"));
  CHECK(g.spec.nx == 15);
  CHECK(g.spec.ny == 15);
  double peak = g.values[0];
  for (double v : g.values) peak = std::max(peak, v);
  CHECK(peak > 10.0);  // two massive bodies sit inside the window

  // Station sampling alongside the grid.
  REQUIRE(run_cli("synth --truth " + dir.file("truth.dep") +
                  " --lattice 4 4 --extent 2 12 2 12 --jitter 0"
                  " --keep-corners --sigma 0 --out " + dir.file("s.svy") +
                  " --stations-out " + dir.file("s.sta")) == 0);
  REQUIRE(run_cli("forward --truth " + dir.file("truth.dep") +
                  " --extent 0 14 0 14 --nx 8 --ny 8 --stations " +
                  dir.file("s.sta") + " --samples-out " + dir.file("f.svy") +
                  " --out " + dir.file("f.grid")) == 0);
  const Survey forward_samples = read_survey(dir.file("f.svy"));
  const Survey synth_samples = read_survey(dir.file("s.svy"));
  REQUIRE(forward_samples.samples.size() == synth_samples.samples.size());
  for (std::size_t i = 0; i < forward_samples.samples.size(); ++i)
    CHECK(forward_samples.samples[i].vz == synth_samples.samples[i].vz);
}

TEST_CASE("failure modes map to documented exit codes") {
  TempDir dir("cli_err");
  // Missing input file: generic error, exit 1.
  CHECK(run_cli("pipeline --survey " + dir.file("absent.svy") + " --out " +
                dir.file("r.txt")) == 1);
  // Featureless data: numeric failure, exit 2.
  Survey flat;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i)
      flat.samples.push_back(
          {{static_cast<double>(i), static_cast<double>(j)}, 1.0});
  write_survey(dir.file("flat.svy"), flat);
  CHECK(run_cli("pipeline --survey " + dir.file("flat.svy") + " --out " +
                dir.file("r.txt")) == 2);
  // Bad usage: exit 1; help: exit 0.
  CHECK(run_cli("") == 1);
  CHECK(run_cli("synth --no-such-flag") == 1);
  CHECK(run_cli("--help") == 0);
  // forward needs exactly one model source.
  write_example_inputs(dir);
  CHECK(run_cli("forward --extent 0 1 0 1 --out " + dir.file("g.grid")) == 1);
}
