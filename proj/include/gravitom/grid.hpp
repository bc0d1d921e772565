#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gravitom/bar_model.hpp"
#include "gravitom/geometry.hpp"
#include "gravitom/survey.hpp"

namespace gravitom {

struct GridSpec {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  std::size_t nx = 2, ny = 2;

  double dx() const { return (x1 - x0) / static_cast<double>(nx - 1); }
  double dy() const { return (y1 - y0) / static_cast<double>(ny - 1); }
  void validate() const;  // nx, ny >= 2; non-degenerate extents
};

// Regular lattice of field values; node (i, j) sits at
// (x0 + i * dx, y0 + j * dy) and values are stored row-major (j outer).
struct FieldGrid {
  GridSpec spec;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const {
    return values[j * spec.nx + i];
  }
  double& at(std::size_t i, std::size_t j) { return values[j * spec.nx + i]; }
  double node_x(std::size_t i) const {
    return spec.x0 + static_cast<double>(i) * spec.dx();
  }
  double node_y(std::size_t j) const {
    return spec.y0 + static_cast<double>(j) * spec.dy();
  }
  void validate() const;  // spec valid, values sized nx*ny, all finite
};

// Dense forward evaluation on the lattice.
FieldGrid grid_field(const Deposit& truth, const GridSpec& spec);
FieldGrid grid_field(const std::vector<BarBody>& truth, const GridSpec& spec);

// Inverse-distance-weighted interpolation of scattered samples onto the
// lattice: weights (d^2 + smoothing^2)^(-power/2). smoothing > 0 bounds
// the weights and irons out single-sample bulls-eyes; with smoothing = 0
// a node that coincides with a sample takes that sample's value.
// Being a weighted average, IDW can place no maximum above the largest
// sample and no extremum between stations; prefer the spline gridder when
// the surface feeds peak detection.
FieldGrid grid_survey(const Survey& survey, const GridSpec& spec,
                      double power = 2.0, double smoothing = 1.0);

// Thin-plate spline interpolation of scattered samples onto the lattice:
//   f(x, y) = a0 + a1 x + a2 y + sum_i c_i r_i^2 log r_i,
// the minimum-curvature surface through the samples. lambda = 0
// interpolates exactly; lambda > 0 smooths (ridge term on the radial
// block), relaxing the surface toward the affine trend. Solves a dense
// (n + 3) x (n + 3) system, O(n^3) — fine at survey sizes. Needs at
// least 3 samples, no duplicate stations, and not all stations
// collinear; throws numeric_error otherwise.
FieldGrid grid_survey_spline(const Survey& survey, const GridSpec& spec,
                             double lambda = 0.0);

// Bounding box of the stations expanded by margin_frac per side.
GridSpec bounds_spec(const std::vector<Station>& stations, std::size_t nx,
                     std::size_t ny, double margin_frac = 0.10);

void write_grid(std::ostream& out, const FieldGrid& grid);
void write_grid(const std::string& path, const FieldGrid& grid);
FieldGrid read_grid(std::istream& in, const std::string& name = "<stream>");
FieldGrid read_grid(const std::string& path);

}  // namespace gravitom
