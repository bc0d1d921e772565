#include "gravitom/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "gravitom/errors.hpp"
#include "gravitom/field.hpp"
#include "text_io.hpp"

namespace gravitom {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2)
    throw std::domain_error("grid: needs at least 2 nodes per axis");
  if (!(x1 > x0) || !(y1 > y0))
    throw std::domain_error("grid: degenerate extent");
}

void FieldGrid::validate() const {
  spec.validate();
  if (values.size() != spec.nx * spec.ny)
    throw std::domain_error("grid: value count does not match nx*ny");
  for (double v : values)
    if (!std::isfinite(v))
      throw std::domain_error("grid: values must be finite");
}

namespace {

template <typename Truth, typename Forward>
FieldGrid grid_impl(const Truth& truth, const GridSpec& spec,
                    Forward&& forward) {
  spec.validate();
  FieldGrid g;
  g.spec = spec;
  g.values.resize(spec.nx * spec.ny);
  for (std::size_t j = 0; j < spec.ny; ++j)
    for (std::size_t i = 0; i < spec.nx; ++i)
      g.at(i, j) = forward(truth, Station{g.node_x(i), g.node_y(j)});
  return g;
}

}  // namespace

FieldGrid grid_field(const Deposit& truth, const GridSpec& spec) {
  return grid_impl(truth, spec, [](const Deposit& d, const Station& st) {
    return vz_deposit(d, st);
  });
}

FieldGrid grid_field(const std::vector<BarBody>& truth, const GridSpec& spec) {
  return grid_impl(truth, spec,
                   [](const std::vector<BarBody>& b, const Station& st) {
                     return bar_vz(b, st);
                   });
}

FieldGrid grid_survey(const Survey& survey, const GridSpec& spec, double power,
                      double smoothing) {
  spec.validate();
  if (survey.samples.empty())
    throw std::invalid_argument("grid_survey: empty survey");
  if (!(power > 0.0))
    throw std::invalid_argument("grid_survey: power must be > 0");
  if (!(smoothing >= 0.0))
    throw std::invalid_argument("grid_survey: smoothing must be >= 0");

  FieldGrid g;
  g.spec = spec;
  g.values.resize(spec.nx * spec.ny);
  const double h2 = smoothing * smoothing;
  for (std::size_t j = 0; j < spec.ny; ++j) {
    for (std::size_t i = 0; i < spec.nx; ++i) {
      const double x = g.node_x(i);
      const double y = g.node_y(j);
      double wsum = 0.0, vsum = 0.0;
      bool pinned = false;
      for (const FieldSample& s : survey.samples) {
        const double dx = x - s.st.x;
        const double dy = y - s.st.y;
        const double d2 = dx * dx + dy * dy;
        if (h2 == 0.0 && d2 < 1e-24) {
          g.at(i, j) = s.vz;
          pinned = true;
          break;
        }
        const double w = std::pow(d2 + h2, -0.5 * power);
        wsum += w;
        vsum += w * s.vz;
      }
      if (!pinned) g.at(i, j) = vsum / wsum;
    }
  }
  return g;
}

namespace {

// r^2 log r expressed in r^2, the thin-plate radial kernel; the limit at
// r = 0 is 0.
double tps_kernel(double r2) { return r2 > 0.0 ? 0.5 * r2 * std::log(r2) : 0.0; }

// Dense partial-pivot LU solve of A x = b in place. A is m x m row-major.
// Throws numeric_error when a pivot degenerates (singular system).
void solve_dense(std::vector<double>& A, std::vector<double>& b,
                 std::size_t m, const char* context) {
  double scale = 0.0;
  for (double v : A) scale = std::max(scale, std::fabs(v));
  const double tiny = scale * 1e-13;
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < m; ++i)
      if (std::fabs(A[i * m + k]) > std::fabs(A[p * m + k])) p = i;
    if (!(std::fabs(A[p * m + k]) > tiny))
      throw numeric_error(std::string(context) + ": singular system");
    if (p != k) {
      for (std::size_t j = k; j < m; ++j) std::swap(A[p * m + j], A[k * m + j]);
      std::swap(b[p], b[k]);
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      const double f = A[i * m + k] / A[k * m + k];
      if (f == 0.0) continue;
      A[i * m + k] = 0.0;
      for (std::size_t j = k + 1; j < m; ++j) A[i * m + j] -= f * A[k * m + j];
      b[i] -= f * b[k];
    }
  }
  for (std::size_t i = m; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < m; ++j) s -= A[i * m + j] * b[j];
    b[i] = s / A[i * m + i];
  }
}

}  // namespace

FieldGrid grid_survey_spline(const Survey& survey, const GridSpec& spec,
                             double lambda) {
  spec.validate();
  const std::size_t n = survey.samples.size();
  if (n < 3)
    throw numeric_error("grid_survey_spline: needs at least 3 samples");
  if (!(lambda >= 0.0))
    throw std::invalid_argument("grid_survey_spline: lambda must be >= 0");

  // Coefficients solve the bordered system
  //   [K + lambda I   P] [c]   [v]      K_ij = kernel(|s_i - s_j|^2)
  //   [P^T            0] [a] = [0],     P_i  = (1, x_i, y_i),
  // where the zero block pins the affine part and the P^T c = 0 rows keep
  // the radial part free of its own affine trend.
  const std::size_t m = n + 3;
  std::vector<double> A(m * m, 0.0), rhs(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Station& si = survey.samples[i].st;
    for (std::size_t j = 0; j < n; ++j) {
      const Station& sj = survey.samples[j].st;
      const double dx = si.x - sj.x;
      const double dy = si.y - sj.y;
      A[i * m + j] = tps_kernel(dx * dx + dy * dy) + (i == j ? lambda : 0.0);
      if (i != j && dx == 0.0 && dy == 0.0)
        throw numeric_error("grid_survey_spline: duplicate station");
    }
    A[i * m + n] = A[(n + 0) * m + i] = 1.0;
    A[i * m + n + 1] = A[(n + 1) * m + i] = si.x;
    A[i * m + n + 2] = A[(n + 2) * m + i] = si.y;
    rhs[i] = survey.samples[i].vz;
  }
  solve_dense(A, rhs, m, "grid_survey_spline");

  FieldGrid g;
  g.spec = spec;
  g.values.resize(spec.nx * spec.ny);
  for (std::size_t j = 0; j < spec.ny; ++j) {
    for (std::size_t i = 0; i < spec.nx; ++i) {
      const double x = g.node_x(i);
      const double y = g.node_y(j);
      double v = rhs[n] + rhs[n + 1] * x + rhs[n + 2] * y;
      for (std::size_t k = 0; k < n; ++k) {
        const double dx = x - survey.samples[k].st.x;
        const double dy = y - survey.samples[k].st.y;
        v += rhs[k] * tps_kernel(dx * dx + dy * dy);
      }
      g.at(i, j) = v;
    }
  }
  return g;
}

GridSpec bounds_spec(const std::vector<Station>& stations, std::size_t nx,
                     std::size_t ny, double margin_frac) {
  if (stations.empty())
    throw std::invalid_argument("bounds_spec: no stations");
  double x0 = stations[0].x, x1 = stations[0].x;
  double y0 = stations[0].y, y1 = stations[0].y;
  for (const Station& s : stations) {
    x0 = std::min(x0, s.x);
    x1 = std::max(x1, s.x);
    y0 = std::min(y0, s.y);
    y1 = std::max(y1, s.y);
  }
  const double mx = (x1 - x0) * margin_frac;
  const double my = (y1 - y0) * margin_frac;
  GridSpec spec{x0 - mx, x1 + mx, y0 - my, y1 + my, nx, ny};
  spec.validate();
  return spec;
}

void write_grid(std::ostream& out, const FieldGrid& grid) {
  using detail::format_double;
  grid.validate();
  out << "# gravitom grid v1\n";
  out << "# x_km " << format_double(grid.spec.x0) << ' '
      << format_double(grid.spec.x1) << ' ' << grid.spec.nx << '\n';
  out << "# y_km " << format_double(grid.spec.y0) << ' '
      << format_double(grid.spec.y1) << ' ' << grid.spec.ny << '\n';
  out << "# vz_mGal matrix, one y-row per line, x varying fastest\n";
  for (std::size_t j = 0; j < grid.spec.ny; ++j) {
    for (std::size_t i = 0; i < grid.spec.nx; ++i) {
      if (i) out << ' ';
      out << format_double(grid.at(i, j));
    }
    out << '\n';
  }
}

void write_grid(const std::string& path, const FieldGrid& grid) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_grid(out, grid);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

FieldGrid read_grid(std::istream& in, const std::string& name) {
  detail::LineReader r(in, name);
  detail::expect_header(r, "grid");

  FieldGrid g;
  bool have_x = false, have_y = false;
  std::string line;
  while (r.next(line)) {
    auto tok = detail::split_tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "#") {
      if (tok.size() == 5 && tok[1] == "x_km") {
        g.spec.x0 = detail::parse_double(r, tok[2], "x0");
        g.spec.x1 = detail::parse_double(r, tok[3], "x1");
        g.spec.nx = static_cast<std::size_t>(
            detail::parse_int(r, tok[4], "nx"));
        have_x = true;
      } else if (tok.size() == 5 && tok[1] == "y_km") {
        g.spec.y0 = detail::parse_double(r, tok[2], "y0");
        g.spec.y1 = detail::parse_double(r, tok[3], "y1");
        g.spec.ny = static_cast<std::size_t>(
            detail::parse_int(r, tok[4], "ny"));
        have_y = true;
      }
      continue;
    }
    if (!have_x || !have_y)
      r.fail("grid values before '# x_km ...' and '# y_km ...' headers");
    if (tok.size() != g.spec.nx)
      r.fail("expected " + std::to_string(g.spec.nx) + " values in row");
    for (const std::string& t : tok)
      g.values.push_back(detail::parse_double(r, t, "grid value"));
  }
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(name + ": " + e.what());
  }
  return g;
}

FieldGrid read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_grid(in, path);
}

}  // namespace gravitom
