#include "gravitom/survey.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "gravitom/field.hpp"
#include "gravitom/units.hpp"
#include "text_io.hpp"

namespace gravitom {

namespace {

// Keeps same-seed jitter and noise streams distinct.
constexpr std::uint64_t kLayoutSalt = 0x9e3779b97f4a7c15ULL;

void ensure_distinct(const std::vector<Station>& stations) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(stations.size());
  for (const Station& s : stations) pts.emplace_back(s.x, s.y);
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
    throw std::domain_error("survey: station positions must be distinct");
}

double forward_vz(const Deposit& truth, const Station& st) {
  return vz_deposit(truth, st);
}

double forward_vz(const std::vector<BarBody>& truth, const Station& st) {
  return bar_vz(truth, st);
}

template <typename Truth>
Survey synth_impl(const Truth& truth, const std::vector<Station>& stations,
                  double sigma, std::uint64_t seed) {
  if (stations.empty())
    throw std::invalid_argument("synth_survey: need at least one station");
  if (!(sigma >= 0.0))
    throw std::domain_error("synth_survey: sigma must be >= 0");
  ensure_distinct(stations);

  Survey out;
  out.noise_sigma = sigma;
  out.seed = seed;
  out.samples.reserve(stations.size());
  NormalDeviates noise(seed);
  for (const Station& st : stations) {
    double vz = forward_vz(truth, st);
    if (sigma > 0.0) vz += sigma * noise.next();
    out.samples.push_back({st, vz});
  }
  return out;
}

}  // namespace

double NormalDeviates::uniform() {
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double NormalDeviates::next() {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

std::vector<Station> lattice_stations(std::size_t nx, std::size_t ny,
                                      double x0, double x1, double y0,
                                      double y1, double jitter_frac,
                                      std::uint64_t seed, bool drop_corners) {
  if (nx < 2 || ny < 2)
    throw std::invalid_argument("lattice_stations: need at least 2x2 nodes");
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("lattice_stations: degenerate extent");
  if (!(jitter_frac >= 0.0) || jitter_frac > 0.5)
    throw std::invalid_argument(
        "lattice_stations: jitter_frac must lie in [0, 0.5]");

  const double sx = (x1 - x0) / static_cast<double>(nx - 1);
  const double sy = (y1 - y0) / static_cast<double>(ny - 1);
  NormalDeviates rng(seed ^ kLayoutSalt);

  std::vector<Station> out;
  out.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (drop_corners && (i == 0 || i + 1 == nx) && (j == 0 || j + 1 == ny))
        continue;
      const double ux = 2.0 * rng.uniform() - 1.0;
      const double uy = 2.0 * rng.uniform() - 1.0;
      double x = x0 + static_cast<double>(i) * sx + jitter_frac * sx * ux;
      double y = y0 + static_cast<double>(j) * sy + jitter_frac * sy * uy;
      out.push_back({std::clamp(x, x0, x1), std::clamp(y, y0, y1)});
    }
  }
  return out;
}

Survey synth_survey(const Deposit& truth, const std::vector<Station>& stations,
                    double sigma, std::uint64_t seed) {
  return synth_impl(truth, stations, sigma, seed);
}

Survey synth_survey(const std::vector<BarBody>& truth,
                    const std::vector<Station>& stations, double sigma,
                    std::uint64_t seed) {
  return synth_impl(truth, stations, sigma, seed);
}

void write_survey(std::ostream& out, const Survey& survey) {
  using detail::format_double;
  out << "# gravitom survey v1\n";
  out << "# noise_sigma " << format_double(survey.noise_sigma) << " seed "
      << survey.seed << '\n';
  out << "# x_km y_km vz_mGal\n";
  for (const FieldSample& s : survey.samples)
    out << format_double(s.st.x) << ' ' << format_double(s.st.y) << ' '
        << format_double(s.vz) << '\n';
}

void write_survey(const std::string& path, const Survey& survey) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_survey(out, survey);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

Survey read_survey(std::istream& in, const std::string& name) {
  detail::LineReader r(in, name);
  detail::expect_header(r, "survey");

  Survey out;
  std::string line;
  while (r.next(line)) {
    auto tok = detail::split_tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "#") {
      // Metadata comment written by write_survey.
      if (tok.size() == 5 && tok[1] == "noise_sigma" && tok[3] == "seed") {
        out.noise_sigma = detail::parse_double(r, tok[2], "noise_sigma");
        out.seed = static_cast<std::uint64_t>(
            detail::parse_int(r, tok[4], "seed"));
      }
      continue;
    }
    if (tok.size() != 3) r.fail("expected 'x y vz'");
    FieldSample s;
    s.st.x = detail::parse_double(r, tok[0], "x");
    s.st.y = detail::parse_double(r, tok[1], "y");
    s.vz = detail::parse_double(r, tok[2], "vz");
    if (!std::isfinite(s.st.x) || !std::isfinite(s.st.y) ||
        !std::isfinite(s.vz))
      r.fail("sample values must be finite");
    out.samples.push_back(s);
  }
  if (out.samples.empty())
    throw std::runtime_error(name + ": no samples");
  std::vector<Station> sts;
  sts.reserve(out.samples.size());
  for (const FieldSample& s : out.samples) sts.push_back(s.st);
  ensure_distinct(sts);
  return out;
}

Survey read_survey(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_survey(in, path);
}

void write_stations(const std::string& path,
                    const std::vector<Station>& stations) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "# gravitom stations v1\n";
  out << "# x_km y_km\n";
  for (const Station& s : stations)
    out << detail::format_double(s.x) << ' ' << detail::format_double(s.y)
        << '\n';
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

std::vector<Station> read_stations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  detail::LineReader r(in, path);
  detail::expect_header(r, "stations");
  std::vector<Station> out;
  std::string line;
  while (r.next_content(line)) {
    auto tok = detail::split_tokens(line);
    if (tok.size() != 2) r.fail("expected 'x y'");
    out.push_back({detail::parse_double(r, tok[0], "x"),
                   detail::parse_double(r, tok[1], "y")});
  }
  if (out.empty()) throw std::runtime_error(path + ": no stations");
  return out;
}

}  // namespace gravitom
