#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gravitom/geometry.hpp"
#include "gravitom/grid.hpp"

namespace gravitom {

struct ContourLine {
  double level = 0.0;
  bool closed = false;
  std::vector<Station> points;
};

// Marching-squares isolines. Every vertex lies on a grid edge at the
// linear-interpolation crossing of the level, so re-interpolating the
// field along that edge recovers the level exactly. Saddle cells are
// disambiguated by the cell-center mean. Levels outside the grid's value
// range simply produce no polylines.
std::vector<ContourLine> extract_contours(const FieldGrid& grid,
                                          const std::vector<double>& levels);

void write_contours(std::ostream& out, const std::vector<ContourLine>& lines);
void write_contours(const std::string& path,
                    const std::vector<ContourLine>& lines);

}  // namespace gravitom
