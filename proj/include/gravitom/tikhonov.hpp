#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gravitom/geometry.hpp"
#include "gravitom/survey.hpp"

namespace gravitom {

// Interval constraint for one parameter. The weight 1/mid^2 makes the
// regularizer and the solution-error metric dimensionless.
struct ParamBox {
  double lo = 0.0;
  double hi = 1.0;

  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  double weight() const;
  void validate() const;  // lo < hi and mid != 0
};

// Constraint boxes for the full parameter vector: five per body in the
// order (eps, rho, x0, y0, z0), bodies in detection order.
struct BoxSet {
  std::vector<ParamBox> boxes;

  std::size_t size() const { return boxes.size(); }
  std::size_t body_count() const { return boxes.size() / 5; }
  std::vector<double> midpoint() const;
  bool contains(std::span<const double> p, double slack = 0.0) const;
  void validate() const;  // non-empty, each box valid
};

enum class Functional { F1, F2 };

inline constexpr std::size_t kParamsPerBody = 5;

// Equatorial semiaxis of a spheroid of fixed mass: a = cbrt(M / ((4/3) pi
// eps rho)). All arguments must be positive.
double semiaxis_from_mass(double mass, double eps, double rho);

// Spheroid implied by one body's (eps, rho, x0, y0, z0) block and its
// fixed mass.
Spheroid body_from_params(std::span<const double> block, double mass);

// alpha-weighted penalty: F1 ties parameters to box midpoints, F2 to
// zero; both are weighted by 1/mid^2.
double regularizer(std::span<const double> params, const BoxSet& boxes,
                   Functional functional);

// Weighted RMS distance between two parameter vectors:
// sqrt(mean of q_j (p_j - ref_j)^2).
double solution_error_delta(std::span<const double> params,
                            std::span<const double> reference,
                            const BoxSet& boxes);

// Minimization target for the coordinate-descent solver. Implementations
// may override the begin/evaluate_coordinate pair with a faster path for
// single-coordinate variation; the default re-evaluates a scratch copy.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  virtual double evaluate(std::span<const double> params) const = 0;
  virtual void begin_coordinate(std::size_t j, std::span<const double> params);
  virtual double evaluate_coordinate(double value) const;

 private:
  mutable std::vector<double> scratch_;
  std::size_t scratch_j_ = 0;
};

// Sum of squared residuals against the survey plus alpha times the
// regularizer, over m bodies with fixed masses; the semiaxis is derived
// from the mass at every trial point. Infeasible geometry (z0 <= eps * a)
// yields +infinity so the solver never leaves the physical domain. The
// coordinate path caches the station sums of the inactive bodies.
class DepositObjective : public Objective {
 public:
  DepositObjective(const Survey& survey, std::vector<double> masses,
                   const BoxSet& boxes, Functional functional, double alpha);

  std::size_t dimension() const override {
    return masses_.size() * kParamsPerBody;
  }
  double evaluate(std::span<const double> params) const override;
  void begin_coordinate(std::size_t j,
                        std::span<const double> params) override;
  double evaluate_coordinate(double value) const override;

  // Sum of squared data values, for reporting the normalized misfit.
  double data_norm2() const { return data_norm2_; }
  const std::vector<double>& masses() const { return masses_; }
  Functional functional() const { return functional_; }
  double alpha() const { return alpha_; }
  const BoxSet& boxes() const { return boxes_; }

 private:
  double body_field(std::span<const double> block, double mass,
                    const Station& st) const;

  const Survey* survey_;
  std::vector<double> masses_;
  BoxSet boxes_;
  Functional functional_;
  double alpha_;
  double data_norm2_;

  // Coordinate-sweep cache.
  std::size_t active_body_ = 0;
  std::size_t active_param_ = 0;
  std::vector<double> base_block_;
  std::vector<double> others_;  // per-station field of the inactive bodies
  double reg_others_ = 0.0;
};

struct SolverOptions {
  double sweep_rel_tol = 1e-8;  // stop when a sweep improves less than this
  std::size_t max_sweeps = 200;
  std::size_t golden_max_iters = 60;
  double golden_tol_frac = 1e-10;  // interval width floor, fraction of box
};

struct DecrementalOptions {
  std::size_t max_rounds = 8;
  double shrink = 0.5;             // new width = shrink * old width
  double interior_margin = 0.10;   // bound-distance fraction counted interior
  double width_floor_frac = 1e-3;  // per-parameter floor vs initial width
};

struct InversionResult {
  std::vector<double> params;
  std::vector<double> trace;  // objective at start and after each sweep
  double f_initial = 0.0;
  double f_final = 0.0;
  std::size_t sweeps = 0;
  std::size_t rounds = 1;
  BoxSet final_boxes;

  // Per-body derived rows (filled for deposit problems by the pipeline).
  std::vector<Spheroid> bodies;
};

// Cyclic coordinate descent with a golden-section line search per
// coordinate, restricted to the boxes. Every iterate stays inside the
// boxes, the trace is non-increasing, and the best point found is always
// returned.
InversionResult coordinate_descent(Objective& objective, const BoxSet& boxes,
                                   std::span<const double> start,
                                   const SolverOptions& opts = {});

// Outer loop of box narrowing: after each descent, every parameter
// strictly interior to its box (further than interior_margin * width from
// both bounds) gets its box shrunk symmetrically about the iterate by the
// shrink factor; parameters resting on a bound keep that bound. Stops
// when all widths fall below their floors, no box changed, or after
// max_rounds.
InversionResult decremental_refine(Objective& objective,
                                   const BoxSet& initial_boxes,
                                   std::span<const double> start,
                                   const SolverOptions& opts = {},
                                   const DecrementalOptions& dopts = {});

// Functional values as free functions.
double objective_f1(std::span<const double> params, const Survey& survey,
                    const std::vector<double>& masses, const BoxSet& boxes,
                    double alpha);
double objective_f2(std::span<const double> params, const Survey& survey,
                    const std::vector<double>& masses, const BoxSet& boxes,
                    double alpha);

}  // namespace gravitom
