#include "gravitom/bulakh.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "gravitom/errors.hpp"
#include "gravitom/field.hpp"
#include "gravitom/units.hpp"
#include "text_io.hpp"

namespace gravitom {

namespace {

double distance(const Station& a, const Station& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

double mu_of_v(double v) {
  if (!(v >= 0.0) || v >= 1.0)
    throw std::domain_error("mu_of_v: ratio must lie in [0, 1)");
  const double w = std::cbrt(v * v);
  return std::sqrt(w / (1.0 - w));
}

double mu_of_v_psi(double v, double psi) {
  if (!(v >= 0.0) || v >= 1.0)
    throw std::domain_error("mu_of_v_psi: ratio must lie in [0, 1)");
  if (!(psi >= 0.0) || psi >= 1.0)
    throw std::domain_error("mu_of_v_psi: offset fraction must lie in [0, 1)");
  const double w = std::cbrt(v * v);
  if (psi * psi > w)
    throw std::domain_error(
        "mu_of_v_psi: reference offset too large for this field ratio");
  return std::sqrt((w - psi * psi) / (1.0 - w));
}

std::vector<ProbePair> select_probe_points(const Survey& survey,
                                           const std::vector<Station>& bodies,
                                           std::size_t index,
                                           const ProbeOptions& opts) {
  if (survey.samples.empty())
    throw std::invalid_argument("select_probe_points: empty survey");
  if (index >= bodies.size())
    throw std::invalid_argument("select_probe_points: body index out of range");
  if (!(opts.v_lo >= 0.0) || !(opts.v_hi <= 1.0) || !(opts.v_lo < opts.v_hi))
    throw std::invalid_argument(
        "select_probe_points: need 0 <= v_lo < v_hi <= 1");
  if (!(opts.own_factor >= 0.0))
    throw std::invalid_argument("select_probe_points: own_factor must be >= 0");

  const Station axis = bodies[index];

  const FieldSample* q = nullptr;
  double delta = std::numeric_limits<double>::infinity();
  for (const FieldSample& s : survey.samples) {
    const double d = distance(s.st, axis);
    if (d < delta) {
      delta = d;
      q = &s;
    }
  }
  if (!(q->vz > 0.0))
    throw numeric_error("select_probe_points: reference field at body " +
                        std::to_string(index) + " is not positive");

  std::vector<ProbePair> probes;
  for (const FieldSample& p : survey.samples) {
    const double s = distance(p.st, axis);
    if (s <= delta) continue;  // also excludes the reference sample itself
    bool in_zone = true;
    for (std::size_t k = 0; k < bodies.size() && in_zone; ++k) {
      if (k == index) continue;
      if (distance(p.st, bodies[k]) < opts.own_factor * s) in_zone = false;
    }
    if (!in_zone) continue;
    const double v = p.vz / q->vz;
    if (!(v > opts.v_lo) || !(v < opts.v_hi)) continue;
    probes.push_back(ProbePair{p, *q, s, delta, v, delta / s});
  }
  if (probes.empty())
    throw numeric_error("select_probe_points: no admissible probes for body " +
                        std::to_string(index));
  return probes;
}

BodyEstimate estimate_depth(const Station& body,
                            const std::vector<ProbePair>& probes) {
  if (probes.empty())
    throw std::invalid_argument("estimate_depth: no probes");
  BodyEstimate est;
  est.x0 = body.x;
  est.y0 = body.y;
  est.q = probes.front().q;
  for (const ProbePair& probe : probes) {
    double z = 0.0;
    try {
      z = mu_of_v_psi(probe.v, probe.psi) * probe.s;
    } catch (const std::domain_error&) {
      ++est.dropped_probes;
      continue;
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
      ++est.dropped_probes;
      continue;
    }
    est.z0_samples.push_back(z);
  }
  if (est.z0_samples.empty())
    throw numeric_error(
        "estimate_depth: every probe is inconsistent with a compact source");
  est.used_probes = est.z0_samples.size();
  est.z0 = mean(est.z0_samples);
  return est;
}

double estimate_mass(double z0, const FieldSample& sample,
                     const Station& body) {
  if (!(z0 > 0.0)) throw std::domain_error("estimate_mass: depth must be > 0");
  const double dx = sample.st.x - body.x;
  const double dy = sample.st.y - body.y;
  const double hyp = z0 * z0 + dx * dx + dy * dy;
  return kMassFactor * hyp * std::sqrt(hyp) / z0 * sample.vz;
}

BodyEstimate estimate_body(const Survey& survey,
                           const std::vector<Station>& bodies,
                           std::size_t index, const ProbeOptions& opts) {
  const auto probes = select_probe_points(survey, bodies, index, opts);
  BodyEstimate est = estimate_depth(bodies[index], probes);
  const Station body{est.x0, est.y0};
  // Mass from the probes whose ratio sits in the depth-insensitive band
  // (see ProbeOptions); each contributes its own off-axis sample at the
  // mean depth. The on-axis reference is deliberately not used: there the
  // mass read scales as depth squared, importing the depth bias wholesale.
  for (const ProbePair& probe : probes)
    if (probe.v > opts.mass_v_lo && probe.v < opts.mass_v_hi)
      est.mass_samples.push_back(estimate_mass(est.z0, probe.p, body));
  if (est.mass_samples.empty())
    for (const ProbePair& probe : probes)
      est.mass_samples.push_back(estimate_mass(est.z0, probe.p, body));
  est.mass = mean(est.mass_samples);
  return est;
}

std::vector<BodyEstimate> estimate_bodies(const Survey& survey,
                                          const std::vector<Station>& bodies,
                                          const ProbeOptions& opts,
                                          std::size_t passes) {
  if (passes == 0)
    throw std::invalid_argument("estimate_bodies: passes must be >= 1");
  std::vector<BodyEstimate> ests;
  ests.reserve(bodies.size());
  for (std::size_t k = 0; k < bodies.size(); ++k)
    ests.push_back(estimate_body(survey, bodies, k, opts));

  for (std::size_t pass = 1; pass < passes && bodies.size() > 1; ++pass) {
    std::vector<BodyEstimate> next;
    next.reserve(bodies.size());
    for (std::size_t k = 0; k < bodies.size(); ++k) {
      Survey cleaned = survey;
      for (FieldSample& s : cleaned.samples)
        for (std::size_t o = 0; o < bodies.size(); ++o)
          if (o != k)
            s.vz -= point_mass_vz(ests[o].mass, ests[o].x0, ests[o].y0,
                                  ests[o].z0, s.st);
      next.push_back(estimate_body(cleaned, bodies, k, opts));
    }
    ests = std::move(next);
  }
  return ests;
}

void write_estimates(std::ostream& out,
                     const std::vector<BodyEstimate>& estimates) {
  using detail::format_double;
  out << "# gravitom estimates v1\n";
  out << "bodies " << estimates.size() << '\n';
  out << "# x0_km y0_km z0_km mass_bln_t probes dropped\n";
  for (const BodyEstimate& e : estimates)
    out << format_double(e.x0) << ' ' << format_double(e.y0) << ' '
        << format_double(e.z0) << ' ' << format_double(e.mass) << ' '
        << e.used_probes << ' ' << e.dropped_probes << '\n';
}

void write_estimates(const std::string& path,
                     const std::vector<BodyEstimate>& estimates) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_estimates(out, estimates);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

std::vector<BodyEstimate> read_estimates(std::istream& in,
                                         const std::string& name) {
  detail::LineReader r(in, name);
  detail::expect_header(r, "estimates");
  std::string line;
  if (!r.next_content(line)) r.fail("expected 'bodies <count>'");
  auto tok = detail::split_tokens(line);
  if (tok.size() != 2 || tok[0] != "bodies")
    r.fail("expected 'bodies <count>'");
  const long long n = detail::parse_int(r, tok[1], "body count");
  if (n < 1) r.fail("body count must be >= 1");

  std::vector<BodyEstimate> out;
  for (long long k = 0; k < n; ++k) {
    if (!r.next_content(line))
      r.fail("expected " + std::to_string(n) + " body rows, got " +
             std::to_string(k));
    tok = detail::split_tokens(line);
    if (tok.size() != 6)
      r.fail("expected 6 values (x0 y0 z0 mass probes dropped), got " +
             std::to_string(tok.size()));
    BodyEstimate e;
    e.x0 = detail::parse_double(r, tok[0], "x0");
    e.y0 = detail::parse_double(r, tok[1], "y0");
    e.z0 = detail::parse_double(r, tok[2], "z0");
    e.mass = detail::parse_double(r, tok[3], "mass");
    const long long probes = detail::parse_int(r, tok[4], "probe count");
    const long long dropped = detail::parse_int(r, tok[5], "dropped count");
    if (probes < 0 || dropped < 0) r.fail("counts must be >= 0");
    e.used_probes = static_cast<std::size_t>(probes);
    e.dropped_probes = static_cast<std::size_t>(dropped);
    if (!(e.z0 > 0.0)) r.fail("depth must be > 0");
    out.push_back(e);
  }
  if (r.next_content(line)) r.fail("unexpected trailing content");
  return out;
}

std::vector<BodyEstimate> read_estimates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_estimates(in, path);
}

}  // namespace gravitom
