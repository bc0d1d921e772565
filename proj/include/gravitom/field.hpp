#pragma once

#include <iosfwd>
#include <string>

#include "gravitom/geometry.hpp"

namespace gravitom {

// Half-width of the band around eps = 1 inside which vz_spheroid treats a
// body as the equal-volume sphere of radius a * cbrt(eps). The closed
// oblate/prolate forms lose all significance as eps -> 1 (0/0), while the
// substitution error is O(band^2) in the field.
inline constexpr double kSphereBand = 1e-7;

// Vertical attraction Vz in mGal at a surface station.
//
// vz_sphere requires eps == 1, vz_oblate eps < 1, vz_prolate eps > 1;
// each throws std::domain_error otherwise or when the body is invalid.
double vz_sphere(const Spheroid& body, const Station& st);
double vz_oblate(const Spheroid& body, const Station& st);
double vz_prolate(const Spheroid& body, const Station& st);

// Dispatches on eps, mapping |eps - 1| < kSphereBand to the equal-volume
// sphere so the field is continuous across the sphere case.
double vz_spheroid(const Spheroid& body, const Station& st);

// Vz of a point mass (bln t) at (x0, y0, z0). Depth must be positive.
double point_mass_vz(double mass, double x0, double y0, double z0,
                     const Station& st);

// Superposed field of all bodies in the deposit.
double vz_deposit(const Deposit& deposit, const Station& st);

// Text round trip: one "x0 y0 z0 a eps rho" line per body under a
// versioned header. Every body is validated on read.
void write_deposit(std::ostream& out, const Deposit& deposit);
void write_deposit(const std::string& path, const Deposit& deposit);
Deposit read_deposit(std::istream& in, const std::string& name = "<stream>");
Deposit read_deposit(const std::string& path);

}  // namespace gravitom
