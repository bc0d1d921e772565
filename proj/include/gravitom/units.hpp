#pragma once

// Practical unit system used throughout the library:
//   length    km
//   density   g/cm^3
//   mass      bln t (1e12 kg)
//   field     mGal  (1e-5 m/s^2)
// The units are chosen so that 1 g/cm^3 == 1 bln t / km^3, hence
// mass = density * volume holds with no conversion factor.

namespace gravitom {

// Gravitational constant 6.674e-11 m^3/(kg s^2) expressed in
// mGal km^2 / bln t.
inline constexpr double kGravity = 6.674;

// Factor of the point-mass estimator mass = kMassFactor * z0^2 * Vz;
// exactly 1/kGravity (~0.1498), often quoted rounded to 0.15.
inline constexpr double kMassFactor = 1.0 / kGravity;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace gravitom
