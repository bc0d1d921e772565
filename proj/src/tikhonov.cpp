#include "gravitom/tikhonov.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gravitom/field.hpp"
#include "gravitom/units.hpp"

namespace gravitom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double checked_mean_weight(const ParamBox& box) {
  box.validate();
  return box.weight();
}

}  // namespace

double ParamBox::weight() const {
  const double m = mid();
  return 1.0 / (m * m);
}

void ParamBox::validate() const {
  if (!(lo < hi)) throw std::domain_error("box: requires lo < hi");
  if (mid() == 0.0)
    throw std::domain_error(
        "box: midpoint must be nonzero (weights are 1/mid^2)");
}

std::vector<double> BoxSet::midpoint() const {
  std::vector<double> out;
  out.reserve(boxes.size());
  for (const ParamBox& b : boxes) out.push_back(b.mid());
  return out;
}

bool BoxSet::contains(std::span<const double> p, double slack) const {
  if (p.size() != boxes.size()) return false;
  for (std::size_t j = 0; j < boxes.size(); ++j)
    if (p[j] < boxes[j].lo - slack || p[j] > boxes[j].hi + slack) return false;
  return true;
}

void BoxSet::validate() const {
  if (boxes.empty()) throw std::domain_error("box set: empty");
  for (const ParamBox& b : boxes) b.validate();
}

double semiaxis_from_mass(double mass, double eps, double rho) {
  if (!(mass > 0.0) || !(eps > 0.0) || !(rho > 0.0))
    throw std::domain_error("semiaxis_from_mass: arguments must be > 0");
  return std::cbrt(mass / ((4.0 / 3.0) * kPi * eps * rho));
}

Spheroid body_from_params(std::span<const double> block, double mass) {
  assert(block.size() == kParamsPerBody);
  Spheroid s;
  s.eps = block[0];
  s.rho = block[1];
  s.x0 = block[2];
  s.y0 = block[3];
  s.z0 = block[4];
  s.a = semiaxis_from_mass(mass, s.eps, s.rho);
  return s;
}

double regularizer(std::span<const double> params, const BoxSet& boxes,
                   Functional functional) {
  if (params.size() != boxes.size())
    throw std::invalid_argument("regularizer: params/boxes length mismatch");
  double sum = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    const ParamBox& box = boxes.boxes[j];
    const double dev =
        functional == Functional::F1 ? params[j] - box.mid() : params[j];
    sum += box.weight() * dev * dev;
  }
  return sum;
}

double solution_error_delta(std::span<const double> params,
                            std::span<const double> reference,
                            const BoxSet& boxes) {
  if (params.size() != reference.size() || params.size() != boxes.size())
    throw std::invalid_argument("solution_error_delta: length mismatch");
  if (params.empty())
    throw std::invalid_argument("solution_error_delta: empty vectors");
  double sum = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    const double d = params[j] - reference[j];
    sum += checked_mean_weight(boxes.boxes[j]) * d * d;
  }
  return std::sqrt(sum / static_cast<double>(params.size()));
}

void Objective::begin_coordinate(std::size_t j,
                                 std::span<const double> params) {
  scratch_.assign(params.begin(), params.end());
  scratch_j_ = j;
}

double Objective::evaluate_coordinate(double value) const {
  scratch_[scratch_j_] = value;
  return evaluate(scratch_);
}

DepositObjective::DepositObjective(const Survey& survey,
                                   std::vector<double> masses,
                                   const BoxSet& boxes, Functional functional,
                                   double alpha)
    : survey_(&survey),
      masses_(std::move(masses)),
      boxes_(boxes),
      functional_(functional),
      alpha_(alpha) {
  if (masses_.empty())
    throw std::invalid_argument("objective: need at least one body");
  for (double m : masses_)
    if (!(m > 0.0))
      throw std::domain_error("objective: body masses must be > 0");
  if (boxes_.size() != masses_.size() * kParamsPerBody)
    throw std::invalid_argument("objective: expected 5 boxes per body");
  boxes_.validate();
  if (!(alpha_ >= 0.0))
    throw std::domain_error("objective: alpha must be >= 0");
  if (survey_->samples.empty())
    throw std::invalid_argument("objective: empty survey");
  data_norm2_ = 0.0;
  for (const FieldSample& s : survey_->samples) data_norm2_ += s.vz * s.vz;
}

double DepositObjective::body_field(std::span<const double> block, double mass,
                                    const Station& st) const {
  const Spheroid s = body_from_params(block, mass);
  return vz_spheroid(s, st);
}

double DepositObjective::evaluate(std::span<const double> params) const {
  if (params.size() != dimension())
    throw std::invalid_argument("objective: wrong parameter count");

  std::vector<Spheroid> bodies;
  bodies.reserve(masses_.size());
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    Spheroid s;
    try {
      s = body_from_params(params.subspan(k * kParamsPerBody, kParamsPerBody),
                           masses_[k]);
      s.validate();
    } catch (const std::domain_error&) {
      return kInf;
    }
    bodies.push_back(s);
  }

  double misfit = 0.0;
  try {
    for (const FieldSample& sample : survey_->samples) {
      double model = 0.0;
      for (const Spheroid& s : bodies) model += vz_spheroid(s, sample.st);
      const double r = sample.vz - model;
      misfit += r * r;
    }
  } catch (const std::domain_error&) {
    return kInf;
  }
  if (!std::isfinite(misfit)) return kInf;
  return misfit + alpha_ * regularizer(params, boxes_, functional_);
}

void DepositObjective::begin_coordinate(std::size_t j,
                                        std::span<const double> params) {
  active_body_ = j / kParamsPerBody;
  active_param_ = j % kParamsPerBody;
  base_block_.assign(
      params.begin() +
          static_cast<std::ptrdiff_t>(active_body_ * kParamsPerBody),
      params.begin() +
          static_cast<std::ptrdiff_t>((active_body_ + 1) * kParamsPerBody));

  others_.assign(survey_->samples.size(), 0.0);
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    if (k == active_body_) continue;
    try {
      const Spheroid s = body_from_params(
          params.subspan(k * kParamsPerBody, kParamsPerBody), masses_[k]);
      s.validate();
      for (std::size_t i = 0; i < survey_->samples.size(); ++i)
        others_[i] += vz_spheroid(s, survey_->samples[i].st);
    } catch (const std::domain_error&) {
      // An infeasible inactive body poisons every trial value of this
      // coordinate; the line search then keeps the baseline.
      std::fill(others_.begin(), others_.end(), kInf);
      break;
    }
  }

  reg_others_ = 0.0;
  if (alpha_ > 0.0) {
    for (std::size_t t = 0; t < params.size(); ++t) {
      if (t == j) continue;
      const ParamBox& box = boxes_.boxes[t];
      const double dev =
          functional_ == Functional::F1 ? params[t] - box.mid() : params[t];
      reg_others_ += box.weight() * dev * dev;
    }
  }
}

double DepositObjective::evaluate_coordinate(double value) const {
  std::array<double, kParamsPerBody> block;
  std::copy(base_block_.begin(), base_block_.end(), block.begin());
  block[active_param_] = value;

  double misfit = 0.0;
  try {
    const Spheroid s =
        body_from_params(std::span<const double>(block), masses_[active_body_]);
    s.validate();
    for (std::size_t i = 0; i < survey_->samples.size(); ++i) {
      const double model = others_[i] + vz_spheroid(s, survey_->samples[i].st);
      const double r = survey_->samples[i].vz - model;
      misfit += r * r;
    }
  } catch (const std::domain_error&) {
    return kInf;
  }
  if (!std::isfinite(misfit)) return kInf;

  double reg = 0.0;
  if (alpha_ > 0.0) {
    const std::size_t j = active_body_ * kParamsPerBody + active_param_;
    const ParamBox& box = boxes_.boxes[j];
    const double dev =
        functional_ == Functional::F1 ? value - box.mid() : value;
    reg = reg_others_ + box.weight() * dev * dev;
  }
  return misfit + alpha_ * reg;
}

namespace {

struct LinePoint {
  double x;
  double f;
};

// Golden-section minimization over [lo, hi] that tracks the best point
// evaluated anywhere, so the result can never be worse than the incoming
// baseline.
LinePoint golden_min(const Objective& obj, double lo, double hi,
                     const SolverOptions& opts, LinePoint baseline) {
  constexpr double kInvPhi = 0.6180339887498949;
  LinePoint best = baseline;
  auto consider = [&](double x, double f) {
    if (f < best.f) best = {x, f};
  };

  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = obj.evaluate_coordinate(x1);
  double f2 = obj.evaluate_coordinate(x2);
  consider(x1, f1);
  consider(x2, f2);

  const double floor = opts.golden_tol_frac * (hi - lo);
  for (std::size_t it = 0; it < opts.golden_max_iters && (b - a) > floor;
       ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = obj.evaluate_coordinate(x1);
      consider(x1, f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = obj.evaluate_coordinate(x2);
      consider(x2, f2);
    }
  }
  return best;
}

}  // namespace

InversionResult coordinate_descent(Objective& objective, const BoxSet& boxes,
                                   std::span<const double> start,
                                   const SolverOptions& opts) {
  boxes.validate();
  if (start.size() != objective.dimension() ||
      boxes.size() != objective.dimension())
    throw std::invalid_argument("coordinate_descent: dimension mismatch");
  if (!boxes.contains(start))
    throw std::invalid_argument("coordinate_descent: start outside boxes");

  InversionResult result;
  result.params.assign(start.begin(), start.end());
  result.final_boxes = boxes;

  double f = objective.evaluate(result.params);
  result.f_initial = f;
  result.trace.push_back(f);

  for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double f_before = f;
    for (std::size_t j = 0; j < result.params.size(); ++j) {
      objective.begin_coordinate(j, result.params);
      const LinePoint best =
          golden_min(objective, boxes.boxes[j].lo, boxes.boxes[j].hi, opts,
                     {result.params[j], f});
      if (best.f < f) {
        result.params[j] = best.x;
        f = best.f;
      }
      assert(boxes.contains(result.params));
    }
    result.trace.push_back(f);
    ++result.sweeps;
    // A sweep that pulled the objective down from +inf does not count as
    // converged, whatever the (then meaningless) relative test says.
    if (std::isinf(f_before) && f < f_before) continue;
    if (!(f_before - f > opts.sweep_rel_tol * std::abs(f_before))) break;
  }

  result.f_final = f;
  return result;
}

InversionResult decremental_refine(Objective& objective,
                                   const BoxSet& initial_boxes,
                                   std::span<const double> start,
                                   const SolverOptions& opts,
                                   const DecrementalOptions& dopts) {
  if (!(dopts.shrink > 0.0) || !(dopts.shrink < 1.0))
    throw std::invalid_argument("decremental_refine: shrink must be in (0,1)");

  std::vector<double> floors;
  floors.reserve(initial_boxes.size());
  for (const ParamBox& b : initial_boxes.boxes)
    floors.push_back(dopts.width_floor_frac * b.width());

  BoxSet boxes = initial_boxes;
  InversionResult result = coordinate_descent(objective, boxes, start, opts);
  std::size_t rounds = 1;

  while (rounds < dopts.max_rounds) {
    bool any_above_floor = false;
    for (std::size_t j = 0; j < boxes.size(); ++j)
      if (boxes.boxes[j].width() > floors[j]) any_above_floor = true;
    if (!any_above_floor) break;

    bool changed = false;
    BoxSet next = boxes;
    for (std::size_t j = 0; j < boxes.size(); ++j) {
      const ParamBox& box = boxes.boxes[j];
      const double p = result.params[j];
      const double margin = dopts.interior_margin * box.width();
      const bool interior = p - box.lo > margin && box.hi - p > margin;
      if (!interior || box.width() <= floors[j]) continue;
      const double half = 0.5 * dopts.shrink * box.width();
      // Shrinking around the iterate never moves a bound outward.
      next.boxes[j].lo = std::max(box.lo, p - half);
      next.boxes[j].hi = std::min(box.hi, p + half);
      changed = true;
    }
    if (!changed) break;

    boxes = next;
    InversionResult stage =
        coordinate_descent(objective, boxes, result.params, opts);
    ++rounds;
    // Append this round's trace (its first entry repeats the previous
    // round's final value).
    result.trace.insert(result.trace.end(), stage.trace.begin() + 1,
                        stage.trace.end());
    result.params = stage.params;
    result.sweeps += stage.sweeps;
    result.f_final = stage.f_final;
    result.final_boxes = boxes;
  }

  result.rounds = rounds;
  return result;
}

double objective_f1(std::span<const double> params, const Survey& survey,
                    const std::vector<double>& masses, const BoxSet& boxes,
                    double alpha) {
  DepositObjective obj(survey, masses, boxes, Functional::F1, alpha);
  return obj.evaluate(params);
}

double objective_f2(std::span<const double> params, const Survey& survey,
                    const std::vector<double>& masses, const BoxSet& boxes,
                    double alpha) {
  DepositObjective obj(survey, masses, boxes, Functional::F2, alpha);
  return obj.evaluate(params);
}

}  // namespace gravitom
