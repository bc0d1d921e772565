#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gravitom/geometry.hpp"

namespace gravitom {

// One occupied depth interval of a vertical bar column; depths are
// positive down and 0 < top < bot.
struct BarInterval {
  double top = 0.0;
  double bot = 0.0;
};

// A body discretized into vertical bars on a regular horizontal grid of
// columns. Column (i, j) has its cross-section centered at
//   (origin_x + (i + 0.5) * dx, origin_y + (j + 0.5) * dy)
// and occupies the depth intervals in cell(i, j); a column may hold
// several intervals (bodies with voids) or none. Build instances with
// from_cells, which validates and freezes the geometry.
class BarBody {
 public:
  static BarBody from_cells(double origin_x, double origin_y, double dx,
                            double dy, std::size_t nx, std::size_t ny,
                            double rho,
                            std::vector<std::vector<BarInterval>> cells);

  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double rho() const { return rho_; }

  const std::vector<BarInterval>& cell(std::size_t i, std::size_t j) const {
    return cells_[j * nx_ + i];
  }
  std::size_t interval_count() const { return col_x_.size(); }

  // Flattened per-interval arrays consumed by the field kernels.
  const std::vector<double>& col_x() const { return col_x_; }
  const std::vector<double>& col_y() const { return col_y_; }
  const std::vector<double>& z_top() const { return z_top_; }
  const std::vector<double>& z_bot() const { return z_bot_; }

 private:
  BarBody() = default;

  double origin_x_ = 0.0, origin_y_ = 0.0;
  double dx_ = 0.0, dy_ = 0.0;
  std::size_t nx_ = 0, ny_ = 0;
  double rho_ = 0.0;
  std::vector<std::vector<BarInterval>> cells_;
  std::vector<double> col_x_, col_y_, z_top_, z_bot_;
};

// Vertical attraction of the bar body at a surface station, in mGal.
// Each interval contributes its exact vertical-line integral taken at the
// column center, so the only discretization error is horizontal.
double bar_vz(const BarBody& body, const Station& st);
double bar_vz(const std::vector<BarBody>& bodies, const Station& st);

// Samples a spheroid into bars with square columns of side `step`
// covering its equatorial extent; a column whose center falls inside the
// equatorial circle gets the chord of the spheroid through that center.
// Requires 0 < step <= a / 10.
BarBody discretize_spheroid(const Spheroid& body, double step);

double body_volume(const BarBody& body);  // km^3
double body_mass(const BarBody& body);    // bln t

// Text serialization (format documented in docs/formats.md).
void write_bar_body(std::ostream& out, const BarBody& body);
void write_bar_body(const std::string& path, const BarBody& body);
BarBody read_bar_body(std::istream& in, const std::string& name = "<stream>");
BarBody read_bar_body(const std::string& path);

}  // namespace gravitom
