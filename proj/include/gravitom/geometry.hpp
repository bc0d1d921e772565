#pragma once

#include <vector>

namespace gravitom {

// Surface observation point. The ground surface is the z = 0 plane and
// depths are positive downward.
struct Station {
  double x = 0.0;  // km
  double y = 0.0;  // km
};

// Homogeneous spheroid (ellipsoid of revolution about the vertical axis)
// buried below the surface. eps is the ratio of the polar semiaxis c to
// the equatorial semiaxis a: eps < 1 oblate, eps > 1 prolate.
struct Spheroid {
  double x0 = 0.0;   // center, km
  double y0 = 0.0;   // center, km
  double z0 = 1.0;   // center depth, km, > 0
  double a = 0.5;    // equatorial semiaxis, km, > 0
  double eps = 1.0;  // axis ratio c/a, > 0
  double rho = 1.0;  // density contrast, g/cm^3

  double polar_semiaxis() const { return eps * a; }
  double volume() const;  // km^3
  double mass() const;    // bln t (equals rho * volume in these units)

  // Throws std::domain_error unless a > 0, eps > 0, rho > 0 and the body
  // lies strictly below the surface (z0 > eps * a).
  void validate() const;
};

// A model of several disjoint bodies; fields superpose.
struct Deposit {
  std::vector<Spheroid> bodies;
};

}  // namespace gravitom
