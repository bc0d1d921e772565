#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gravitom/survey.hpp"

namespace gravitom {

// Depth factor of the point-mass model: a body whose field falls to the
// fraction v of its on-axis value at horizontal distance s from the axis
// lies at depth z0 = mu * s. Domain v in [0, 1); strictly increasing.
double mu_of_v(double v);

// Generalization for a reference measurement taken at horizontal offset
// delta from the axis, with psi = delta / s. Requires psi^2 <= v^(2/3)
// (otherwise the two measurements are inconsistent with a point mass).
double mu_of_v_psi(double v, double psi);

// A probe couples the reference sample Q (nearest the pole, offset delta
// from the axis) with an outlying sample P at axis distance s.
struct ProbePair {
  FieldSample p;
  FieldSample q;
  double s = 0.0;      // km, |P - axis|, > 0
  double delta = 0.0;  // km, |Q - axis|, >= 0
  double v = 0.0;      // field ratio vz_P / vz_Q, in (0, 1)
  double psi = 0.0;    // delta / s, in [0, 1)
};

struct BodyEstimate {
  double x0 = 0.0, y0 = 0.0;  // axis position (from detection), km
  double z0 = 0.0;            // mean depth estimate, km
  double mass = 0.0;          // mean mass estimate, bln t
  std::vector<double> z0_samples;
  std::vector<double> mass_samples;
  std::size_t used_probes = 0;     // probes that contributed a depth sample
  std::size_t dropped_probes = 0;  // probes rejected as inconsistent
  FieldSample q;                   // reference sample used
};

struct ProbeOptions {
  double v_lo = 0.05;   // admissible field-ratio band: mu(v) is
  double v_hi = 0.95;   // ill-conditioned toward both ends
  double own_factor = 1.5;  // P must be this much closer to its own pole

  // Field-ratio sub-band whose probes feed the mass average. The mass
  // read from a sample at axis distance r, M = (z0^2 + r^2)^(3/2) / z0
  // * vz / G, has depth sensitivity dlnM/dlnz0 = 3 z0^2/(z0^2 + r^2) - 1:
  // +2 on the axis, 0 at r = sqrt(2) z0 (ratio v = 3^(-3/2) ~= 0.19), -1
  // far out. A band around the stationary ratio keeps the mass estimate
  // first-order immune to the depth bias that extended bodies induce in
  // the point-mass depth read.
  double mass_v_lo = 0.08;
  double mass_v_hi = 0.45;
};

// Builds probe pairs for body `index` of `bodies` (detected axis
// positions). Q is the sample nearest the body's axis; P candidates are
// samples lying clearly in this body's zone: for every other body,
// dist(P, other) >= own_factor * dist(P, this). Pairs whose ratio falls
// outside (v_lo, v_hi) or with s <= delta are discarded. Throws
// numeric_error if nothing admissible remains.
std::vector<ProbePair> select_probe_points(const Survey& survey,
                                           const std::vector<Station>& bodies,
                                           std::size_t index,
                                           const ProbeOptions& opts = {});

// Mean of per-probe depths mu(v, psi) * s; probes whose geometry violates
// the point-mass domain are dropped (count reported via the estimate).
// Throws numeric_error when every probe is invalid.
BodyEstimate estimate_depth(const Station& body,
                            const std::vector<ProbePair>& probes);

// Point-mass mass estimate from a depth and one sample at horizontal
// offset delta = |sample - body| from the axis.
double estimate_mass(double z0, const FieldSample& sample,
                     const Station& body);

// Full initial estimate: depth averaged over all admissible probes, mass
// averaged over the probes in the depth-insensitive ratio band (falling
// back to all used probes when the band is empty).
BodyEstimate estimate_body(const Survey& survey,
                           const std::vector<Station>& bodies,
                           std::size_t index, const ProbeOptions& opts = {});

// Joint estimates for all bodies. The first pass works on the raw
// samples, where every body's field still carries the others'
// superposed. Each later pass re-estimates body k from samples with the
// point-mass fields of the other bodies' current estimates subtracted,
// stripping most of that bias; the leftover is second order, so two
// passes suffice. With a single body (or passes = 1) this reduces to
// estimate_body per body.
std::vector<BodyEstimate> estimate_bodies(const Survey& survey,
                                          const std::vector<Station>& bodies,
                                          const ProbeOptions& opts = {},
                                          std::size_t passes = 2);

// Text round trip of the per-body summaries (position, depth, mass,
// probe counts). The per-probe sample lists are not persisted; a file
// read back carries empty sample vectors.
void write_estimates(std::ostream& out,
                     const std::vector<BodyEstimate>& estimates);
void write_estimates(const std::string& path,
                     const std::vector<BodyEstimate>& estimates);
std::vector<BodyEstimate> read_estimates(std::istream& in,
                                         const std::string& name = "<stream>");
std::vector<BodyEstimate> read_estimates(const std::string& path);

}  // namespace gravitom
