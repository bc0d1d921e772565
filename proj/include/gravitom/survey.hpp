#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "gravitom/bar_model.hpp"
#include "gravitom/geometry.hpp"

namespace gravitom {

struct FieldSample {
  Station st;
  double vz = 0.0;  // mGal
};

struct Survey {
  std::vector<FieldSample> samples;
  double noise_sigma = 0.0;  // mGal; 0 for clean data
  std::uint64_t seed = 0;
};

// Deterministic standard-normal stream, identical on every platform:
// mt19937_64 words mapped to [0, 1) via (x >> 11) * 2^-53, combined by the
// Box-Muller transform (two uniforms per deviate, cosine branch).
class NormalDeviates {
 public:
  explicit NormalDeviates(std::uint64_t seed) : rng_(seed) {}
  double uniform();  // [0, 1)
  double next();     // standard normal

 private:
  std::mt19937_64 rng_;
};

// Regular nx x ny lattice over [x0, x1] x [y0, y1], each node displaced by
// a uniform jitter of up to jitter_frac of the node spacing per axis
// (jitter_frac in [0, 0.5] keeps stations distinct), optionally dropping
// the four corner nodes. Jitter draws come from a stream salted from
// `seed` so they are independent of same-seed noise draws.
std::vector<Station> lattice_stations(std::size_t nx, std::size_t ny,
                                      double x0, double x1, double y0,
                                      double y1, double jitter_frac,
                                      std::uint64_t seed, bool drop_corners);

// Forward-models the truth at each station and adds N(0, sigma^2) noise
// drawn deterministically from the seed, in station order.
Survey synth_survey(const Deposit& truth, const std::vector<Station>& stations,
                    double sigma, std::uint64_t seed);
Survey synth_survey(const std::vector<BarBody>& truth,
                    const std::vector<Station>& stations, double sigma,
                    std::uint64_t seed);

void write_survey(std::ostream& out, const Survey& survey);
void write_survey(const std::string& path, const Survey& survey);
Survey read_survey(std::istream& in, const std::string& name = "<stream>");
Survey read_survey(const std::string& path);

void write_stations(const std::string& path,
                    const std::vector<Station>& stations);
std::vector<Station> read_stations(const std::string& path);

}  // namespace gravitom
