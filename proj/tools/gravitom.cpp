// Command-line front end: forward simulation, survey synthesis, anomaly
// detection, initial estimation, constrained refinement, and contour
// export as composable subcommands over documented text files.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gravitom/bar_model.hpp"
#include "gravitom/bulakh.hpp"
#include "gravitom/contour.hpp"
#include "gravitom/detect.hpp"
#include "gravitom/errors.hpp"
#include "gravitom/field.hpp"
#include "gravitom/grid.hpp"
#include "gravitom/pipeline.hpp"
#include "gravitom/survey.hpp"
#include "gravitom/tikhonov.hpp"

namespace {

using namespace gravitom;

PipelineConfig load_config(const std::string& path,
                           const std::vector<std::string>& overrides) {
  PipelineConfig cfg =
      path.empty() ? PipelineConfig{} : PipelineConfig::from_file(path);
  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  return cfg;
}

GridSpec spec_from(const std::vector<double>& extent, std::size_t nx,
                   std::size_t ny) {
  GridSpec spec;
  spec.x0 = extent[0];
  spec.x1 = extent[1];
  spec.y0 = extent[2];
  spec.y1 = extent[3];
  spec.nx = nx;
  spec.ny = ny;
  spec.validate();
  return spec;
}

struct ForwardArgs {
  std::string truth, bar_body, out, stations, samples_out;
  std::vector<double> extent;
  std::size_t nx = 61, ny = 61;
  double bar_step = 0.0;  // 0 = closed forms
};

void cmd_forward(const ForwardArgs& a) {
  if (a.truth.empty() == a.bar_body.empty())
    throw std::runtime_error("forward: give exactly one of --truth/--bar-body");
  if (a.stations.empty() != a.samples_out.empty())
    throw std::runtime_error(
        "forward: --stations and --samples-out go together");
  const GridSpec spec = spec_from(a.extent, a.nx, a.ny);

  FieldGrid grid;
  if (!a.bar_body.empty()) {
    const std::vector<BarBody> bars{read_bar_body(a.bar_body)};
    grid = grid_field(bars, spec);
    if (!a.stations.empty())
      write_survey(a.samples_out,
                   synth_survey(bars, read_stations(a.stations), 0.0, 0));
  } else {
    const Deposit truth = read_deposit(a.truth);
    if (a.bar_step > 0.0) {
      std::vector<BarBody> bars;
      for (const Spheroid& b : truth.bodies)
        bars.push_back(discretize_spheroid(b, a.bar_step));
      grid = grid_field(bars, spec);
      if (!a.stations.empty())
        write_survey(a.samples_out,
                     synth_survey(bars, read_stations(a.stations), 0.0, 0));
    } else {
      grid = grid_field(truth, spec);
      if (!a.stations.empty())
        write_survey(a.samples_out,
                     synth_survey(truth, read_stations(a.stations), 0.0, 0));
    }
  }
  write_grid(a.out, grid);
}

struct SynthArgs {
  std::string truth, bar_body, stations, out, stations_out;
  std::vector<std::size_t> lattice;  // nx ny
  std::vector<double> extent;        // x0 x1 y0 y1
  double jitter = 0.25;
  bool keep_corners = false;
  double sigma = 0.0;
  std::uint64_t seed = 1;
};

void cmd_synth(const SynthArgs& a) {
  if (a.truth.empty() == a.bar_body.empty())
    throw std::runtime_error("synth: give exactly one of --truth/--bar-body");
  if (a.stations.empty() == a.lattice.empty())
    throw std::runtime_error("synth: give exactly one of --stations/--lattice");

  std::vector<Station> stations;
  if (!a.stations.empty()) {
    stations = read_stations(a.stations);
  } else {
    if (a.extent.size() != 4)
      throw std::runtime_error("synth: --lattice needs --extent x0 x1 y0 y1");
    stations = lattice_stations(a.lattice[0], a.lattice[1], a.extent[0],
                                a.extent[1], a.extent[2], a.extent[3],
                                a.jitter, a.seed, !a.keep_corners);
  }

  Survey survey;
  if (!a.bar_body.empty()) {
    const std::vector<BarBody> bars{read_bar_body(a.bar_body)};
    survey = synth_survey(bars, stations, a.sigma, a.seed);
  } else {
    survey = synth_survey(read_deposit(a.truth), stations, a.sigma, a.seed);
  }
  write_survey(a.out, survey);
  if (!a.stations_out.empty()) write_stations(a.stations_out, stations);
}

struct StageArgs {
  std::string survey, detection, estimates, config, out, grid_out;
  std::vector<std::string> overrides;
};

void cmd_detect(const StageArgs& a) {
  const PipelineConfig cfg = load_config(a.config, a.overrides);
  const Survey survey = read_survey(a.survey);
  const FieldGrid grid = make_grid(survey, cfg);
  const DetectionReport report =
      detect_bodies(grid, survey.noise_sigma, cfg);
  write_detection(a.out, report);
  if (!a.grid_out.empty()) write_grid(a.grid_out, grid);
}

void cmd_estimate(const StageArgs& a) {
  const PipelineConfig cfg = load_config(a.config, a.overrides);
  const Survey survey = read_survey(a.survey);
  const DetectionReport detection = read_detection(a.detection);
  const std::vector<Station> bodies = detection.resolved_bodies();
  if (bodies.empty())
    throw numeric_error("estimate: the detection report holds no bodies");
  std::vector<BodyEstimate> estimates;
  for (std::size_t k = 0; k < bodies.size(); ++k)
    estimates.push_back(estimate_body(survey, bodies, k, cfg.probe));
  write_estimates(a.out, estimates);
}

void cmd_invert(const StageArgs& a) {
  const PipelineConfig cfg = load_config(a.config, a.overrides);
  PipelineResult result;
  const Survey survey = read_survey(a.survey);
  result.detection = read_detection(a.detection);
  result.estimates = read_estimates(a.estimates);
  const std::vector<Station> bodies = result.detection.resolved_bodies();
  if (bodies.empty())
    throw numeric_error("invert: the detection report holds no bodies");
  if (result.estimates.size() != bodies.size())
    throw std::runtime_error("invert: " + std::to_string(bodies.size()) +
                             " detected bodies but " +
                             std::to_string(result.estimates.size()) +
                             " estimates");
  result.boxes = build_boxes(cfg, bodies, result.estimates);
  for (const BodyEstimate& e : result.estimates)
    result.masses.push_back(e.mass);
  result.inversion = refine_bodies(survey, result.masses, result.boxes, cfg,
                                   &result.data_norm2);
  write_report(a.out, result, cfg);
}

struct PipelineArgs {
  std::string survey, config, out;
  std::string grid_out, detection_out, estimates_out;
  std::vector<std::string> overrides;
};

void cmd_pipeline(const PipelineArgs& a) {
  const PipelineConfig cfg = load_config(a.config, a.overrides);
  const Survey survey = read_survey(a.survey);
  const PipelineResult result = run_pipeline(survey, cfg);
  write_report(a.out, result, cfg);
  if (!a.grid_out.empty()) write_grid(a.grid_out, result.grid);
  if (!a.detection_out.empty())
    write_detection(a.detection_out, result.detection);
  if (!a.estimates_out.empty())
    write_estimates(a.estimates_out, result.estimates);
}

struct ContourArgs {
  std::string grid, out;
  std::vector<double> levels;
};

void cmd_contours(const ContourArgs& a) {
  const FieldGrid grid = read_grid(a.grid);
  write_contours(a.out, extract_contours(grid, a.levels));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Forward and inverse gravimetry over spheroidal deposit models"};
  app.require_subcommand(1);

  ForwardArgs fw;
  CLI::App* forward = app.add_subcommand(
      "forward", "Evaluate a truth model's field on a regular grid");
  forward->add_option("--truth", fw.truth, "Deposit description file");
  forward->add_option("--bar-body", fw.bar_body, "Bar-body description file");
  forward->add_option("--extent", fw.extent, "Grid extent: x0 x1 y0 y1 (km)")
      ->expected(4)
      ->required();
  forward->add_option("--nx", fw.nx, "Grid nodes in x (default 61)");
  forward->add_option("--ny", fw.ny, "Grid nodes in y (default 61)");
  forward->add_option("--bars", fw.bar_step,
                      "Discretize spheroids into bars with this step (km); "
                      "default uses the closed forms");
  forward->add_option("--stations", fw.stations,
                      "Also sample the field at these stations");
  forward->add_option("--samples-out", fw.samples_out,
                      "Where to write the station samples (clean survey)");
  forward->add_option("--out", fw.out, "Output grid file")->required();
  forward->callback([&fw] { cmd_forward(fw); });

  SynthArgs sy;
  CLI::App* synth = app.add_subcommand(
      "synth", "Synthesize a noisy survey from a truth model");
  synth->add_option("--truth", sy.truth, "Deposit description file");
  synth->add_option("--bar-body", sy.bar_body, "Bar-body description file");
  synth->add_option("--stations", sy.stations, "Station list file");
  synth->add_option("--lattice", sy.lattice,
                    "Jittered station lattice: nx ny")
      ->expected(2);
  synth->add_option("--extent", sy.extent,
                    "Lattice extent: x0 x1 y0 y1 (km)")
      ->expected(4);
  synth->add_option("--jitter", sy.jitter,
                    "Lattice jitter fraction in [0, 0.5] (default 0.25)");
  synth->add_flag("--keep-corners", sy.keep_corners,
                  "Keep the four lattice corner stations");
  synth->add_option("--sigma", sy.sigma, "Noise sigma (mGal, default 0)");
  synth->add_option("--seed", sy.seed, "Noise/jitter seed (default 1)");
  synth->add_option("--out", sy.out, "Output survey file")->required();
  synth->add_option("--stations-out", sy.stations_out,
                    "Also write the station list");
  synth->callback([&sy] { cmd_synth(sy); });

  StageArgs de;
  CLI::App* detect = app.add_subcommand(
      "detect", "Grid a survey and resolve distinct anomaly poles");
  detect->add_option("--survey", de.survey, "Survey file")->required();
  detect->add_option("--config", de.config, "Pipeline config file");
  detect->add_option("--set", de.overrides, "Config override key=value");
  detect->add_option("--grid-out", de.grid_out,
                     "Also write the interpolated grid");
  detect->add_option("--out", de.out, "Output detection report")->required();
  detect->callback([&de] { cmd_detect(de); });

  StageArgs es;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Point-mass depth/mass estimates per detected body");
  estimate->add_option("--survey", es.survey, "Survey file")->required();
  estimate->add_option("--detection", es.detection, "Detection report")
      ->required();
  estimate->add_option("--config", es.config, "Pipeline config file");
  estimate->add_option("--set", es.overrides, "Config override key=value");
  estimate->add_option("--out", es.out, "Output estimates file")->required();
  estimate->callback([&es] { cmd_estimate(es); });

  StageArgs iv;
  CLI::App* invert = app.add_subcommand(
      "invert", "Constrained refinement of the detected bodies");
  invert->add_option("--survey", iv.survey, "Survey file")->required();
  invert->add_option("--detection", iv.detection, "Detection report")
      ->required();
  invert->add_option("--estimates", iv.estimates, "Estimates file")
      ->required();
  invert->add_option("--config", iv.config, "Pipeline config file");
  invert->add_option("--set", iv.overrides, "Config override key=value");
  invert->add_option("--out", iv.out, "Output report file")->required();
  invert->callback([&iv] { cmd_invert(iv); });

  PipelineArgs pl;
  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "Detection, estimation and refinement end to end");
  pipeline->add_option("--survey", pl.survey, "Survey file")->required();
  pipeline->add_option("--config", pl.config, "Pipeline config file");
  pipeline->add_option("--set", pl.overrides, "Config override key=value");
  pipeline->add_option("--out", pl.out, "Output report file")->required();
  pipeline->add_option("--grid-out", pl.grid_out,
                       "Also write the interpolated grid");
  pipeline->add_option("--detection-out", pl.detection_out,
                       "Also write the detection report");
  pipeline->add_option("--estimates-out", pl.estimates_out,
                       "Also write the initial estimates");
  pipeline->callback([&pl] { cmd_pipeline(pl); });

  ContourArgs co;
  CLI::App* contours = app.add_subcommand(
      "contours", "Extract isolines from a grid for plotting");
  contours->add_option("--grid", co.grid, "Grid file")->required();
  contours->add_option("--levels", co.levels, "Isoline levels (mGal)")
      ->expected(-1)
      ->required();
  contours->add_option("--out", co.out, "Output polyline file")->required();
  contours->callback([&co] { cmd_contours(co); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const gravitom::numeric_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
