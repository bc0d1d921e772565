#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "gravitom/grid.hpp"

namespace gravitom {

// A local maximum of the gridded anomaly. (x, y) are refined off-node by
// a quadratic fit over the 3x3 neighborhood; vz and (node_i, node_j)
// refer to the grid node itself.
struct Pole {
  double x = 0.0, y = 0.0;  // km
  double vz = 0.0;          // mGal
  std::size_t node_i = 0, node_j = 0;
  double prominence = 0.0;  // mGal
};

struct DetectionReport {
  std::vector<Pole> poles;            // prominence-filtered, vz descending
  std::vector<std::size_t> body_pole; // index into poles per resolved body
  std::vector<std::vector<double>> valley_ratios;  // pairwise, in [0, 1]
  double noise_sigma = 0.0;
  double noise_fraction = 0.0;  // noise_sigma / mean pole intensity

  std::vector<Station> resolved_bodies() const {
    std::vector<Station> out;
    for (std::size_t k : body_pole)
      out.push_back({poles[k].x, poles[k].y});
    return out;
  }
};

// All strict local maxima over the 8-neighborhood whose topographic
// prominence reaches min_prominence, sorted by vz descending. Only
// interior nodes qualify: a boundary node's neighborhood is truncated, so
// a maximum there cannot be certified (and interpolated surfaces drift
// toward the data mean beyond the stations, faking rim maxima).
std::vector<Pole> find_poles(const FieldGrid& grid, double min_prominence);

// Highest field value whose super-level set connects the two nodes: the
// max over 8-connected grid paths of the minimum value along the path.
double watershed_saddle(const FieldGrid& grid, std::size_t i1, std::size_t j1,
                        std::size_t i2, std::size_t j2);

// Splits poles into distinct bodies with the two-condition valley test:
// poles P1, P2 are distinct iff the valley fraction (V - v)/V with
// V = (vz1 + vz2)/2 and v the watershed saddle reaches valley_threshold,
// AND noise_sigma / V <= 0.20. Poles are visited in descending order and
// merged into the strongest already-accepted body that fails the test.
DetectionReport resolve_bodies(const std::vector<Pole>& poles,
                               const FieldGrid& grid, double noise_sigma,
                               double valley_threshold = 0.20);

void write_detection(std::ostream& out, const DetectionReport& report);
void write_detection(const std::string& path, const DetectionReport& report);
DetectionReport read_detection(std::istream& in,
                               const std::string& name = "<stream>");
DetectionReport read_detection(const std::string& path);

}  // namespace gravitom
