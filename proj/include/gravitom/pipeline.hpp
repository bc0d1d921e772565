#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gravitom/bulakh.hpp"
#include "gravitom/contour.hpp"
#include "gravitom/detect.hpp"
#include "gravitom/grid.hpp"
#include "gravitom/survey.hpp"
#include "gravitom/tikhonov.hpp"

namespace gravitom {

// How scattered samples become a lattice. Spline (thin-plate, the
// minimum-curvature surface) preserves peak shape and lets maxima sit
// between stations, so it is the default ahead of detection; Idw is a
// bounded weighted average — artifact-free but peak-flattening.
enum class GridMethod { Spline, Idw };

// Declarative settings for the survey -> report pipeline; parsed from a
// key = value file (schema in docs/formats.md) with CLI flag overrides.
struct PipelineConfig {
  // Gridding of the scattered survey.
  std::size_t grid_nx = 61, grid_ny = 61;
  double grid_margin = 0.10;
  GridMethod grid_method = GridMethod::Spline;
  double spline_lambda = 0.0;  // 0 = exact interpolation
  double idw_power = 2.0;
  double idw_smoothing = 1.0;  // km

  // Detection.
  double min_prominence_sigmas = 3.0;  // times the survey noise sigma
  double min_prominence_floor = 0.25;  // mGal, lower bound on the gate
  double valley_threshold = 0.20;

  // Probe selection for the initial estimates, and how many estimation
  // passes to run (passes after the first subtract the other bodies'
  // estimated point-mass fields before re-estimating).
  ProbeOptions probe;
  std::size_t estimate_passes = 1;

  // Mass selection for refinement. Probe masses carry a known upward
  // bias (superposed neighbor fields; noise-selected band entries), so
  // the pipeline refines over a small ladder of per-body mass scale
  // factors, greedily per body, and keeps the best-fitting combination.
  // After that refinement the pipeline re-estimates each body on samples
  // with the other refined spheroids' fields subtracted (the converged
  // model is the best decontaminator available) and repeats the ladder
  // around the cleaned masses with the fine scales. Each further cycle
  // re-subtracts with the improved bodies; bias flows from the body
  // cleaned first to the one cleaned next, so two cycles settle a
  // two-body mutual contamination. Empty scale lists switch the
  // respective ladder off; reestimate_cycles = 0 skips re-estimation.
  std::vector<double> mass_scales{0.65, 0.75, 0.85, 0.95, 1.0, 1.05};
  std::vector<double> mass_scales_fine{0.8, 0.9, 1.0, 1.1};
  std::size_t mass_rounds = 2;
  std::size_t reestimate_cycles = 2;

  // Refinement.
  Functional functional = Functional::F1;
  double alpha = 0.0;
  SolverOptions solver;
  DecrementalOptions decremental;
  bool use_decremental = false;

  // Explicit per-body boxes (5 per body, (eps, rho, x0, y0, z0) order).
  // Matched to detected bodies by the (x0, y0) box midpoints; empty means
  // boxes are built automatically around the initial estimates.
  std::vector<ParamBox> explicit_boxes;

  // Automatic box construction.
  ParamBox autobox_eps{0.3, 3.0};
  ParamBox autobox_rho{1.2, 3.2};
  double autobox_xy_halfwidth = 0.75;  // km around the detected pole
  double autobox_z_lo_factor = 0.7;    // times the depth estimate
  double autobox_z_hi_factor = 1.4;

  static PipelineConfig from_file(const std::string& path);
  // Applies one "key=value" override; throws std::runtime_error on
  // unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
};

struct PipelineResult {
  FieldGrid grid;
  DetectionReport detection;
  std::vector<BodyEstimate> estimates;  // detection order
  BoxSet boxes;                         // as used by the solver
  std::vector<double> masses;           // fixed per body during refinement
  InversionResult inversion;
  double data_norm2 = 0.0;
  // Misfit objective at the very first refinement iterate: box midpoints
  // with the raw initial mass estimates, before any mass-scale search or
  // re-estimation. f_start / inversion.f_final is the descent achieved by
  // the whole refinement stage. inversion.f_initial, by contrast, belongs
  // to the last internal refinement run (which starts from better masses).
  double f_start = 0.0;
};

// Runs gridding, detection, per-body initial estimation, box setup, and
// refinement. Throws numeric_error when no body is detected or explicit
// boxes cannot be matched one-to-one to the detected bodies.
PipelineResult run_pipeline(const Survey& survey, const PipelineConfig& cfg);

// Individual stages, also used by the staged CLI subcommands.
FieldGrid make_grid(const Survey& survey, const PipelineConfig& cfg);
DetectionReport detect_bodies(const FieldGrid& grid, double noise_sigma,
                              const PipelineConfig& cfg);
InversionResult refine_bodies(const Survey& survey,
                              const std::vector<double>& masses,
                              const BoxSet& boxes, const PipelineConfig& cfg,
                              double* data_norm2 = nullptr);

// Boxes for the detected bodies: explicit boxes reordered by nearest
// anchor, or automatic boxes around the estimates.
BoxSet build_boxes(const PipelineConfig& cfg,
                   const std::vector<Station>& bodies,
                   const std::vector<BodyEstimate>& estimates);

void write_report(std::ostream& out, const PipelineResult& result,
                  const PipelineConfig& cfg);
void write_report(const std::string& path, const PipelineResult& result,
                  const PipelineConfig& cfg);

}  // namespace gravitom
