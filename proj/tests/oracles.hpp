#pragma once

// Independent reference implementations used to cross-check the library's
// closed forms. Everything here is built from first principles only: the
// field of a buried body is the volume integral of the point-mass kernel,
//
//   Vz(st) = G rho  \int_body  z / ((sx-x)^2 + (sy-y)^2 + z^2)^{3/2}  dV,
//
// evaluated by Gauss-Legendre quadrature over the unit ball mapped onto
// the spheroid. No confocal-coordinate algebra is shared with the
// library, so agreement validates the closed forms end to end.

#include <cmath>
#include <cstddef>
#include <vector>

#include "gravitom/geometry.hpp"
#include "gravitom/units.hpp"

namespace oracle {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on the Legendre
// recurrence (standard construction).
inline GaussRule gauss_legendre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(gravitom::kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Vertical attraction of a homogeneous spheroid by 3-D quadrature in
// spherical coordinates over the unit ball (smooth integrand for any
// station strictly outside the body). n = 32 gives ~12 significant
// digits for the geometries used in the tests.
inline double vz_quadrature(const gravitom::Spheroid& body,
                            const gravitom::Station& st,
                            std::size_t n = 32) {
  const GaussRule g = gauss_legendre(n);
  const double c = body.eps * body.a;
  double sum = 0.0;
  for (std::size_t ir = 0; ir < n; ++ir) {
    const double r = 0.5 * (g.nodes[ir] + 1.0);          // [0, 1]
    const double wr = 0.5 * g.weights[ir];
    for (std::size_t it = 0; it < n; ++it) {
      const double th = 0.5 * (g.nodes[it] + 1.0) * gravitom::kPi;
      const double wt = 0.5 * gravitom::kPi * g.weights[it];
      const double sth = std::sin(th), cth = std::cos(th);
      for (std::size_t ip = 0; ip < n; ++ip) {
        const double ph = (g.nodes[ip] + 1.0) * gravitom::kPi;
        const double wp = gravitom::kPi * g.weights[ip];
        const double u = r * sth * std::cos(ph);
        const double v = r * sth * std::sin(ph);
        const double w = r * cth;
        const double dx = st.x - (body.x0 + body.a * u);
        const double dy = st.y - (body.y0 + body.a * v);
        const double z = body.z0 + c * w;
        const double rr2 = dx * dx + dy * dy + z * z;
        const double rr = std::sqrt(rr2);
        sum += wr * wt * wp * (z / (rr2 * rr)) * r * r * sth;
      }
    }
  }
  return gravitom::kGravity * body.rho * body.a * body.a * c * sum;
}

// Splitmix64: tiny deterministic generator for hand-rolled property
// tests, independent of the library's RNG.
class SplitMix {
 public:
  explicit SplitMix(unsigned long long seed) : state_(seed) {}
  unsigned long long next_u64() {
    unsigned long long z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  unsigned long long state_ = 0;
};

}  // namespace oracle
