#include "gravitom/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gravitom/errors.hpp"
#include "gravitom/field.hpp"
#include "text_io.hpp"

namespace gravitom {

namespace {

double parse_value(const std::string& key, const std::string& text,
                   std::size_t index = 0) {
  const auto tok = detail::split_tokens(text);
  if (index >= tok.size())
    throw std::runtime_error("config: key '" + key + "' needs " +
                             std::to_string(index + 1) + " value(s)");
  double v = 0.0;
  const char* first = tok[index].data();
  const char* last = first + tok[index].size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw std::runtime_error("config: key '" + key +
                             "': expected a number, got '" + tok[index] + "'");
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_value(key, text);
  if (!(v >= 0.0) || v != std::floor(v))
    throw std::runtime_error("config: key '" + key +
                             "' must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

// Box keys look like "box.2.rho"; bodies are 1-based in the file.
bool parse_box_key(const std::string& key, std::size_t* body,
                   std::size_t* param) {
  if (key.rfind("box.", 0) != 0) return false;
  const std::size_t dot = key.find('.', 4);
  if (dot == std::string::npos) return false;
  const std::string num = key.substr(4, dot - 4);
  const std::string name = key.substr(dot + 1);
  static const char* names[kParamsPerBody] = {"eps", "rho", "x0", "y0", "z0"};
  std::size_t p = kParamsPerBody;
  for (std::size_t t = 0; t < kParamsPerBody; ++t)
    if (name == names[t]) p = t;
  if (p == kParamsPerBody) return false;
  char* end = nullptr;
  const long n = std::strtol(num.c_str(), &end, 10);
  if (end == nullptr || *end != '\0' || n <= 0) return false;
  *body = static_cast<std::size_t>(n - 1);
  *param = p;
  return true;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  std::size_t body = 0, param = 0;
  if (parse_box_key(key, &body, &param)) {
    const std::size_t need = (body + 1) * kParamsPerBody;
    if (explicit_boxes.size() < need)
      explicit_boxes.resize(need, ParamBox{0.0, 0.0});
    explicit_boxes[body * kParamsPerBody + param] = {
        parse_value(key, value, 0), parse_value(key, value, 1)};
    return;
  }

  if (key == "grid.nx") grid_nx = parse_count(key, value);
  else if (key == "grid.ny") grid_ny = parse_count(key, value);
  else if (key == "grid.margin") grid_margin = parse_value(key, value);
  else if (key == "grid.method") {
    if (value == "spline") grid_method = GridMethod::Spline;
    else if (value == "idw") grid_method = GridMethod::Idw;
    else
      throw std::runtime_error("config: grid.method must be spline or idw");
  } else if (key == "spline.lambda")
    spline_lambda = parse_value(key, value);
  else if (key == "idw.power") idw_power = parse_value(key, value);
  else if (key == "idw.smoothing") idw_smoothing = parse_value(key, value);
  else if (key == "detect.min_prominence_sigmas")
    min_prominence_sigmas = parse_value(key, value);
  else if (key == "detect.min_prominence_floor")
    min_prominence_floor = parse_value(key, value);
  else if (key == "detect.valley_threshold")
    valley_threshold = parse_value(key, value);
  else if (key == "probe.v_lo") probe.v_lo = parse_value(key, value);
  else if (key == "probe.v_hi") probe.v_hi = parse_value(key, value);
  else if (key == "probe.own_factor")
    probe.own_factor = parse_value(key, value);
  else if (key == "probe.mass_v_lo") probe.mass_v_lo = parse_value(key, value);
  else if (key == "probe.mass_v_hi") probe.mass_v_hi = parse_value(key, value);
  else if (key == "estimate.passes")
    estimate_passes = parse_count(key, value);
  else if (key == "estimate.reestimate")
    reestimate_cycles = parse_count(key, value);
  else if (key == "refine.mass_scales" || key == "refine.mass_scales_fine") {
    std::vector<double>& dst =
        key == "refine.mass_scales" ? mass_scales : mass_scales_fine;
    dst.clear();
    const auto tok = detail::split_tokens(value);
    for (std::size_t i = 0; i < tok.size(); ++i)
      dst.push_back(parse_value(key, value, i));
  } else if (key == "refine.mass_rounds")
    mass_rounds = parse_count(key, value);
  else if (key == "refine.functional") {
    if (value == "F1") functional = Functional::F1;
    else if (value == "F2") functional = Functional::F2;
    else
      throw std::runtime_error("config: refine.functional must be F1 or F2");
  } else if (key == "refine.alpha") alpha = parse_value(key, value);
  else if (key == "refine.max_sweeps")
    solver.max_sweeps = parse_count(key, value);
  else if (key == "refine.sweep_rel_tol")
    solver.sweep_rel_tol = parse_value(key, value);
  else if (key == "refine.golden_iters")
    solver.golden_max_iters = parse_count(key, value);
  else if (key == "refine.decremental")
    use_decremental = parse_value(key, value) != 0.0;
  else if (key == "refine.rounds")
    decremental.max_rounds = parse_count(key, value);
  else if (key == "refine.shrink") decremental.shrink = parse_value(key, value);
  else if (key == "autobox.eps")
    autobox_eps = {parse_value(key, value, 0), parse_value(key, value, 1)};
  else if (key == "autobox.rho")
    autobox_rho = {parse_value(key, value, 0), parse_value(key, value, 1)};
  else if (key == "autobox.xy_halfwidth")
    autobox_xy_halfwidth = parse_value(key, value);
  else if (key == "autobox.z_factors") {
    autobox_z_lo_factor = parse_value(key, value, 0);
    autobox_z_hi_factor = parse_value(key, value, 1);
  } else
    throw std::runtime_error("config: unknown key '" + key + "'");
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  detail::LineReader r(in, path);
  detail::expect_header(r, "config");

  PipelineConfig cfg;
  std::string line;
  while (r.next_content(line)) {
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) r.fail("expected 'key = value'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) r.fail("empty key");
    try {
      cfg.set(key, value);
    } catch (const std::exception& e) {
      r.fail(e.what());
    }
  }
  return cfg;
}

BoxSet build_boxes(const PipelineConfig& cfg,
                   const std::vector<Station>& bodies,
                   const std::vector<BodyEstimate>& estimates) {
  const std::size_t m = bodies.size();
  if (m == 0) throw numeric_error("build_boxes: no bodies");
  BoxSet out;

  if (!cfg.explicit_boxes.empty()) {
    if (cfg.explicit_boxes.size() != m * kParamsPerBody)
      throw numeric_error(
          "build_boxes: configured boxes cover " +
          std::to_string(cfg.explicit_boxes.size() / kParamsPerBody) +
          " bodies but " + std::to_string(m) + " were detected");
    // Match box blocks to detected bodies by the (x0, y0) box midpoints,
    // minimizing the total squared distance over all assignments.
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const ParamBox& bx =
            cfg.explicit_boxes[perm[k] * kParamsPerBody + 2];
        const ParamBox& by =
            cfg.explicit_boxes[perm[k] * kParamsPerBody + 3];
        const double dx = bx.mid() - bodies[k].x;
        const double dy = by.mid() - bodies[k].y;
        cost += dx * dx + dy * dy;
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t t = 0; t < kParamsPerBody; ++t)
        out.boxes.push_back(
            cfg.explicit_boxes[best[k] * kParamsPerBody + t]);
    out.validate();
    return out;
  }

  if (estimates.size() != m)
    throw std::invalid_argument("build_boxes: estimates/bodies mismatch");
  for (std::size_t k = 0; k < m; ++k) {
    out.boxes.push_back(cfg.autobox_eps);
    out.boxes.push_back(cfg.autobox_rho);
    out.boxes.push_back({bodies[k].x - cfg.autobox_xy_halfwidth,
                         bodies[k].x + cfg.autobox_xy_halfwidth});
    out.boxes.push_back({bodies[k].y - cfg.autobox_xy_halfwidth,
                         bodies[k].y + cfg.autobox_xy_halfwidth});
    out.boxes.push_back({cfg.autobox_z_lo_factor * estimates[k].z0,
                         cfg.autobox_z_hi_factor * estimates[k].z0});
  }
  out.validate();
  return out;
}

FieldGrid make_grid(const Survey& survey, const PipelineConfig& cfg) {
  std::vector<Station> stations;
  stations.reserve(survey.samples.size());
  for (const FieldSample& s : survey.samples) stations.push_back(s.st);
  const GridSpec spec =
      bounds_spec(stations, cfg.grid_nx, cfg.grid_ny, cfg.grid_margin);
  return cfg.grid_method == GridMethod::Spline
             ? grid_survey_spline(survey, spec, cfg.spline_lambda)
             : grid_survey(survey, spec, cfg.idw_power, cfg.idw_smoothing);
}

DetectionReport detect_bodies(const FieldGrid& grid, double noise_sigma,
                              const PipelineConfig& cfg) {
  const double gate = std::max(cfg.min_prominence_sigmas * noise_sigma,
                               cfg.min_prominence_floor);
  const auto poles = find_poles(grid, gate);
  return resolve_bodies(poles, grid, noise_sigma, cfg.valley_threshold);
}

InversionResult refine_bodies(const Survey& survey,
                              const std::vector<double>& masses,
                              const BoxSet& boxes, const PipelineConfig& cfg,
                              double* data_norm2) {
  DepositObjective objective(survey, masses, boxes, cfg.functional,
                             cfg.alpha);
  if (data_norm2) *data_norm2 = objective.data_norm2();
  const std::vector<double> start = boxes.midpoint();
  InversionResult inversion =
      cfg.use_decremental
          ? decremental_refine(objective, boxes, start, cfg.solver,
                               cfg.decremental)
          : coordinate_descent(objective, boxes, start, cfg.solver);
  for (std::size_t k = 0; k < masses.size(); ++k)
    inversion.bodies.push_back(body_from_params(
        std::span<const double>(inversion.params)
            .subspan(k * kParamsPerBody, kParamsPerBody),
        masses[k]));
  return inversion;
}

namespace {

// Refines at the base masses, then greedily walks each body's mass over
// base * scale candidates, keeping the combination with the lowest final
// objective. The chosen masses land in *masses.
InversionResult ladder_refine(const Survey& survey,
                              const std::vector<double>& base,
                              const std::vector<double>& scales,
                              const BoxSet& boxes, const PipelineConfig& cfg,
                              std::vector<double>* masses,
                              double* data_norm2,
                              double* base_f_initial = nullptr) {
  *masses = base;
  InversionResult best = refine_bodies(survey, base, boxes, cfg, data_norm2);
  if (base_f_initial != nullptr) *base_f_initial = best.f_initial;
  if (scales.empty()) return best;

  std::vector<double> chosen(base.size(), 1.0);
  std::vector<double> trial = base;
  for (std::size_t round = 0; round < cfg.mass_rounds; ++round) {
    bool improved = false;
    for (std::size_t k = 0; k < base.size(); ++k) {
      for (double s : scales) {
        if (s == chosen[k]) continue;
        trial[k] = base[k] * s;
        InversionResult cand = refine_bodies(survey, trial, boxes, cfg);
        if (cand.f_final < best.f_final) {
          best = std::move(cand);
          chosen[k] = s;
          improved = true;
        }
      }
      trial[k] = base[k] * chosen[k];
    }
    if (!improved) break;
  }
  *masses = trial;
  return best;
}

}  // namespace

PipelineResult run_pipeline(const Survey& survey, const PipelineConfig& cfg) {
  PipelineResult result;
  result.grid = make_grid(survey, cfg);
  result.detection = detect_bodies(result.grid, survey.noise_sigma, cfg);

  const std::vector<Station> bodies = result.detection.resolved_bodies();
  if (bodies.empty()) throw numeric_error("pipeline: no bodies detected");

  result.estimates =
      estimate_bodies(survey, bodies, cfg.probe, cfg.estimate_passes);
  result.boxes = build_boxes(cfg, bodies, result.estimates);

  std::vector<double> base;
  for (const BodyEstimate& e : result.estimates) base.push_back(e.mass);
  result.inversion =
      ladder_refine(survey, base, cfg.mass_scales, result.boxes, cfg,
                    &result.masses, &result.data_norm2, &result.f_start);

  for (std::size_t cycle = 0; cycle < cfg.reestimate_cycles; ++cycle) {
    // The converged spheroids are the best available model of each
    // body's surroundings: re-read every body from samples with the
    // other bodies' refined fields subtracted, at the refined axis, then
    // re-select masses around the cleaned estimates.
    std::vector<Station> axes;
    for (const Spheroid& s : result.inversion.bodies)
      axes.push_back({s.x0, s.y0});
    std::vector<BodyEstimate> cleaned_estimates;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      Survey cleaned = survey;
      for (FieldSample& smp : cleaned.samples)
        for (std::size_t o = 0; o < axes.size(); ++o)
          if (o != k)
            smp.vz -= vz_spheroid(result.inversion.bodies[o], smp.st);
      // With the other bodies subtracted the whole survey reads this body
      // alone, so the estimate runs single-axis: keeping the other axes
      // would re-apply the zone rule and discard every far-side probe.
      const std::vector<Station> own_axis = {axes[k]};
      try {
        cleaned_estimates.push_back(
            estimate_body(cleaned, own_axis, 0, cfg.probe));
      } catch (const numeric_error&) {
        // Decontamination can empty a body's probe set (e.g. a grazing
        // axis shift); keep the raw estimate rather than fail the run.
        cleaned_estimates.push_back(result.estimates[k]);
      }
    }
    result.estimates = std::move(cleaned_estimates);

    base.clear();
    for (const BodyEstimate& e : result.estimates) base.push_back(e.mass);
    result.inversion =
        ladder_refine(survey, base, cfg.mass_scales_fine, result.boxes, cfg,
                      &result.masses, nullptr);
  }
  return result;
}

void write_report(std::ostream& out, const PipelineResult& result,
                  const PipelineConfig& cfg) {
  using detail::format_double;
  out << "# gravitom report v1\n";
  out << "noise_sigma " << format_double(result.detection.noise_sigma)
      << '\n';
  out << "bodies " << result.inversion.bodies.size() << '\n';
  out << "# per body: estimate pole_x pole_y z0 M probes dropped\n";
  for (std::size_t k = 0; k < result.estimates.size(); ++k) {
    const BodyEstimate& e = result.estimates[k];
    out << "body " << k + 1 << " estimate " << format_double(e.x0) << ' '
        << format_double(e.y0) << ' ' << format_double(e.z0) << ' '
        << format_double(e.mass) << ' ' << e.used_probes << ' '
        << e.dropped_probes << '\n';
  }
  out << "# per body: solution eps rho x0 y0 z0 a v M\n";
  for (std::size_t k = 0; k < result.inversion.bodies.size(); ++k) {
    const Spheroid& s = result.inversion.bodies[k];
    out << "body " << k + 1 << " solution " << format_double(s.eps) << ' '
        << format_double(s.rho) << ' ' << format_double(s.x0) << ' '
        << format_double(s.y0) << ' ' << format_double(s.z0) << ' '
        << format_double(s.a) << ' ' << format_double(s.volume()) << ' '
        << format_double(s.mass()) << '\n';
  }
  out << "# per body: box lo/hi rows in (eps rho x0 y0 z0) order\n";
  for (std::size_t k = 0; k < result.inversion.bodies.size(); ++k) {
    out << "body " << k + 1 << " box_lo";
    for (std::size_t t = 0; t < kParamsPerBody; ++t)
      out << ' '
          << format_double(result.boxes.boxes[k * kParamsPerBody + t].lo);
    out << '\n';
    out << "body " << k + 1 << " box_hi";
    for (std::size_t t = 0; t < kParamsPerBody; ++t)
      out << ' '
          << format_double(result.boxes.boxes[k * kParamsPerBody + t].hi);
    out << '\n';
  }
  out << "functional " << (cfg.functional == Functional::F1 ? "F1" : "F2")
      << " alpha " << format_double(cfg.alpha) << '\n';
  out << "objective_initial " << format_double(result.inversion.f_initial)
      << " final " << format_double(result.inversion.f_final) << '\n';
  if (result.data_norm2 > 0.0)
    out << "objective_normalized_initial "
        << format_double(result.inversion.f_initial / result.data_norm2)
        << " final "
        << format_double(result.inversion.f_final / result.data_norm2)
        << '\n';
  out << "sweeps " << result.inversion.sweeps << " rounds "
      << result.inversion.rounds << '\n';
  out << "trace";
  for (double v : result.inversion.trace) out << ' ' << format_double(v);
  out << '\n';
}

void write_report(const std::string& path, const PipelineResult& result,
                  const PipelineConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_report(out, result, cfg);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

}  // namespace gravitom
