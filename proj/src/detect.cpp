#include "gravitom/detect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "text_io.hpp"

namespace gravitom {

namespace {

struct Dsu {
  std::vector<std::int64_t> parent;  // -1 while a node is inactive

  explicit Dsu(std::size_t n) : parent(n, -1) {}

  std::size_t find(std::size_t v) {
    std::size_t root = v;
    while (parent[root] != static_cast<std::int64_t>(root))
      root = static_cast<std::size_t>(parent[root]);
    while (parent[v] != static_cast<std::int64_t>(v)) {
      const auto next = static_cast<std::size_t>(parent[v]);
      parent[v] = static_cast<std::int64_t>(root);
      v = next;
    }
    return root;
  }

  bool active(std::size_t v) const { return parent[v] >= 0; }
  void activate(std::size_t v) { parent[v] = static_cast<std::int64_t>(v); }
  void link(std::size_t a, std::size_t b) {
    parent[find(a)] = static_cast<std::int64_t>(find(b));
  }
};

// Grid nodes in descending value order (ties broken by index so the
// traversal is deterministic).
std::vector<std::size_t> descending_nodes(const FieldGrid& g) {
  std::vector<std::size_t> order(g.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (g.values[a] != g.values[b]) return g.values[a] > g.values[b];
    return a < b;
  });
  return order;
}

template <typename Fn>
void for_each_neighbor(const FieldGrid& g, std::size_t node, Fn&& fn) {
  const std::size_t nx = g.spec.nx;
  const std::size_t i = node % nx;
  const std::size_t j = node / nx;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      const auto ni = static_cast<std::int64_t>(i) + di;
      const auto nj = static_cast<std::int64_t>(j) + dj;
      if (ni < 0 || nj < 0 || ni >= static_cast<std::int64_t>(nx) ||
          nj >= static_cast<std::int64_t>(g.spec.ny))
        continue;
      fn(static_cast<std::size_t>(nj) * nx + static_cast<std::size_t>(ni));
    }
  }
}

// Least-squares quadratic over the 3x3 neighborhood in unit offsets; the
// fit's critical point, when it is a genuine interior maximum, shifts the
// pole off its node.
void refine_pole(const FieldGrid& g, Pole& p) {
  const std::size_t i = p.node_i, j = p.node_j;
  if (i == 0 || j == 0 || i + 1 >= g.spec.nx || j + 1 >= g.spec.ny) return;

  double s0 = 0, su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
  for (int dv = -1; dv <= 1; ++dv) {
    for (int du = -1; du <= 1; ++du) {
      const double z = g.at(i + static_cast<std::size_t>(du + 1) - 1,
                            j + static_cast<std::size_t>(dv + 1) - 1);
      s0 += z;
      su += du * z;
      sv += dv * z;
      suu += du * du * z;
      svv += dv * dv * z;
      suv += du * dv * z;
    }
  }
  const double b = su / 6.0;
  const double c = sv / 6.0;
  const double f = suv / 4.0;
  const double dpe = (suu + svv - (4.0 / 3.0) * s0) / 2.0;  // D + E
  const double dme = (suu - svv) / 2.0;                     // D - E
  const double d = 0.5 * (dpe + dme);
  const double e = 0.5 * (dpe - dme);

  const double det = 4.0 * d * e - f * f;
  if (!(det > 0.0) || !(d < 0.0)) return;  // not a concave critical point
  const double u = (-2.0 * e * b + f * c) / det;
  const double v = (f * b - 2.0 * d * c) / det;
  if (std::abs(u) > 1.0 || std::abs(v) > 1.0) return;
  p.x = g.node_x(i) + u * g.spec.dx();
  p.y = g.node_y(j) + v * g.spec.dy();
}

}  // namespace

std::vector<Pole> find_poles(const FieldGrid& grid, double min_prominence) {
  grid.validate();
  if (!(min_prominence >= 0.0))
    throw std::domain_error("find_poles: min_prominence must be >= 0");

  const std::size_t n = grid.values.size();
  std::vector<char> is_max(n, 1);
  for (std::size_t node = 0; node < n; ++node) {
    for_each_neighbor(grid, node, [&](std::size_t nb) {
      if (grid.values[nb] >= grid.values[node]) is_max[node] = 0;
    });
  }

  // Topographic prominence by a descending flood: when the component of a
  // lesser peak first touches a higher component, the current water level
  // is that peak's key saddle.
  const auto order = descending_nodes(grid);
  Dsu dsu(n);
  std::vector<std::size_t> comp_peak(n, 0);
  std::vector<double> prominence(n, 0.0);
  for (std::size_t node : order) {
    dsu.activate(node);
    comp_peak[node] = node;
    for_each_neighbor(grid, node, [&](std::size_t nb) {
      if (!dsu.active(nb)) return;
      const std::size_t ra = dsu.find(node);
      const std::size_t rb = dsu.find(nb);
      if (ra == rb) return;
      std::size_t high = comp_peak[ra], low = comp_peak[rb];
      if (grid.values[low] > grid.values[high] ||
          (grid.values[low] == grid.values[high] && low < high))
        std::swap(high, low);
      prominence[low] = grid.values[low] - grid.values[node];
      dsu.link(ra, rb);
      comp_peak[dsu.find(ra)] = high;
    });
  }
  const std::size_t top = order.front();
  prominence[top] = grid.values[top] - grid.values[order.back()];

  std::vector<Pole> poles;
  for (std::size_t node = 0; node < n; ++node) {
    if (!is_max[node] || prominence[node] < min_prominence) continue;
    Pole p;
    p.node_i = node % grid.spec.nx;
    p.node_j = node / grid.spec.nx;
    // A maximum on the grid boundary cannot be certified: part of its
    // neighborhood is missing, and interpolated surfaces relax toward the
    // data mean beyond the stations, which manufactures rim maxima.
    if (p.node_i == 0 || p.node_i + 1 == grid.spec.nx || p.node_j == 0 ||
        p.node_j + 1 == grid.spec.ny)
      continue;
    p.x = grid.node_x(p.node_i);
    p.y = grid.node_y(p.node_j);
    p.vz = grid.values[node];
    p.prominence = prominence[node];
    refine_pole(grid, p);
    poles.push_back(p);
  }
  std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) {
    if (a.vz != b.vz) return a.vz > b.vz;
    if (a.node_j != b.node_j) return a.node_j < b.node_j;
    return a.node_i < b.node_i;
  });
  return poles;
}

double watershed_saddle(const FieldGrid& grid, std::size_t i1, std::size_t j1,
                        std::size_t i2, std::size_t j2) {
  grid.validate();
  if (i1 >= grid.spec.nx || i2 >= grid.spec.nx || j1 >= grid.spec.ny ||
      j2 >= grid.spec.ny)
    throw std::invalid_argument("watershed_saddle: node out of range");
  const std::size_t a = j1 * grid.spec.nx + i1;
  const std::size_t b = j2 * grid.spec.nx + i2;
  if (a == b) return grid.values[a];

  Dsu dsu(grid.values.size());
  for (std::size_t node : descending_nodes(grid)) {
    dsu.activate(node);
    for_each_neighbor(grid, node, [&](std::size_t nb) {
      if (dsu.active(nb)) dsu.link(node, nb);
    });
    if (dsu.active(a) && dsu.active(b) && dsu.find(a) == dsu.find(b))
      return grid.values[node];
  }
  throw std::logic_error("watershed_saddle: nodes never connected");
}

DetectionReport resolve_bodies(const std::vector<Pole>& poles,
                               const FieldGrid& grid, double noise_sigma,
                               double valley_threshold) {
  grid.validate();
  if (!(valley_threshold > 0.0) || !(valley_threshold < 1.0))
    throw std::domain_error("resolve_bodies: threshold must be in (0, 1)");
  if (!(noise_sigma >= 0.0))
    throw std::domain_error("resolve_bodies: noise_sigma must be >= 0");

  const std::size_t n = poles.size();
  DetectionReport report;
  report.poles = poles;
  report.noise_sigma = noise_sigma;
  report.valley_ratios.assign(n, std::vector<double>(n, 0.0));

  std::vector<std::vector<double>> mean_vz(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double pair_mean = 0.5 * (poles[i].vz + poles[k].vz);
      const double saddle =
          watershed_saddle(grid, poles[i].node_i, poles[i].node_j,
                           poles[k].node_i, poles[k].node_j);
      double valley = pair_mean > 0.0 ? (pair_mean - saddle) / pair_mean : 0.0;
      valley = std::clamp(valley, 0.0, 1.0);
      report.valley_ratios[i][k] = report.valley_ratios[k][i] = valley;
      mean_vz[i][k] = mean_vz[k][i] = pair_mean;
    }
  }

  // Poles arrive strongest-first; a pole that fails the two-condition
  // test against any accepted body is absorbed by it (the stronger pole
  // stands for the body).
  std::vector<std::size_t> desc(n);
  std::iota(desc.begin(), desc.end(), std::size_t{0});
  std::sort(desc.begin(), desc.end(), [&](std::size_t a, std::size_t b) {
    if (poles[a].vz != poles[b].vz) return poles[a].vz > poles[b].vz;
    return a < b;
  });
  for (std::size_t k : desc) {
    bool distinct_from_all = true;
    for (std::size_t body : report.body_pole) {
      const double pair_mean = mean_vz[k][body];
      const bool distinct =
          report.valley_ratios[k][body] >= valley_threshold &&
          (pair_mean > 0.0 && noise_sigma / pair_mean <= 0.20);
      if (!distinct) {
        distinct_from_all = false;
        break;
      }
    }
    if (distinct_from_all) report.body_pole.push_back(k);
  }

  double mean_pole = 0.0;
  for (const Pole& p : poles) mean_pole += p.vz;
  if (n > 0) mean_pole /= static_cast<double>(n);
  report.noise_fraction = mean_pole > 0.0 ? noise_sigma / mean_pole : 0.0;
  return report;
}

void write_detection(std::ostream& out, const DetectionReport& report) {
  using detail::format_double;
  out << "# gravitom detect v1\n";
  out << "# noise_sigma " << format_double(report.noise_sigma)
      << " noise_fraction " << format_double(report.noise_fraction) << '\n';
  out << "# pole lines: x_km y_km vz_mGal node_i node_j prominence_mGal\n";
  out << "poles " << report.poles.size() << '\n';
  for (const Pole& p : report.poles)
    out << format_double(p.x) << ' ' << format_double(p.y) << ' '
        << format_double(p.vz) << ' ' << p.node_i << ' ' << p.node_j << ' '
        << format_double(p.prominence) << '\n';
  out << "bodies " << report.body_pole.size() << '\n';
  for (std::size_t k : report.body_pole) out << k << '\n';
  out << "valleys\n";
  for (const auto& row : report.valley_ratios) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_detection(const std::string& path, const DetectionReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_detection(out, report);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

DetectionReport read_detection(std::istream& in, const std::string& name) {
  detail::LineReader r(in, name);
  detail::expect_header(r, "detect");

  DetectionReport report;
  std::string line;
  while (r.next(line)) {
    auto tok = detail::split_tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "#") {
      if (tok.size() == 5 && tok[1] == "noise_sigma" &&
          tok[3] == "noise_fraction") {
        report.noise_sigma = detail::parse_double(r, tok[2], "noise_sigma");
        report.noise_fraction =
            detail::parse_double(r, tok[4], "noise_fraction");
      }
      continue;
    }
    if (tok[0] == "poles") {
      if (tok.size() != 2) r.fail("expected 'poles <count>'");
      const long long cnt = detail::parse_int(r, tok[1], "pole count");
      for (long long k = 0; k < cnt; ++k) {
        if (!r.next_content(line)) r.fail("unexpected end of pole list");
        auto pt = detail::split_tokens(line);
        if (pt.size() != 6)
          r.fail("expected 'x y vz node_i node_j prominence'");
        Pole p;
        p.x = detail::parse_double(r, pt[0], "x");
        p.y = detail::parse_double(r, pt[1], "y");
        p.vz = detail::parse_double(r, pt[2], "vz");
        p.node_i =
            static_cast<std::size_t>(detail::parse_int(r, pt[3], "node_i"));
        p.node_j =
            static_cast<std::size_t>(detail::parse_int(r, pt[4], "node_j"));
        p.prominence = detail::parse_double(r, pt[5], "prominence");
        report.poles.push_back(p);
      }
    } else if (tok[0] == "bodies") {
      if (tok.size() != 2) r.fail("expected 'bodies <count>'");
      const long long cnt = detail::parse_int(r, tok[1], "body count");
      for (long long k = 0; k < cnt; ++k) {
        if (!r.next_content(line)) r.fail("unexpected end of body list");
        auto bt = detail::split_tokens(line);
        if (bt.size() != 1) r.fail("expected one pole index per line");
        const long long idx = detail::parse_int(r, bt[0], "pole index");
        if (idx < 0 || idx >= static_cast<long long>(report.poles.size()))
          r.fail("pole index out of range");
        report.body_pole.push_back(static_cast<std::size_t>(idx));
      }
    } else if (tok[0] == "valleys") {
      const std::size_t n = report.poles.size();
      report.valley_ratios.assign(n, std::vector<double>(n, 0.0));
      for (std::size_t j = 0; j < n; ++j) {
        if (!r.next_content(line)) r.fail("unexpected end of valley matrix");
        auto vt = detail::split_tokens(line);
        if (vt.size() != n)
          r.fail("expected " + std::to_string(n) + " valley values");
        for (std::size_t i = 0; i < n; ++i)
          report.valley_ratios[j][i] =
              detail::parse_double(r, vt[i], "valley value");
      }
    } else {
      r.fail("unknown record '" + tok[0] + "'");
    }
  }
  return report;
}

DetectionReport read_detection(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_detection(in, path);
}

}  // namespace gravitom
