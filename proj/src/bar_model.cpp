#include "gravitom/bar_model.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "gravitom/kernels.hpp"
#include "gravitom/units.hpp"
#include "text_io.hpp"

namespace gravitom {

BarBody BarBody::from_cells(double origin_x, double origin_y, double dx,
                            double dy, std::size_t nx, std::size_t ny,
                            double rho,
                            std::vector<std::vector<BarInterval>> cells) {
  if (!(dx > 0.0) || !(dy > 0.0))
    throw std::domain_error("bar body: cell sizes must be > 0");
  if (nx == 0 || ny == 0)
    throw std::domain_error("bar body: column grid must be non-empty");
  if (!(rho > 0.0)) throw std::domain_error("bar body: density must be > 0");
  if (cells.size() != nx * ny)
    throw std::invalid_argument("bar body: expected nx*ny cells");

  BarBody b;
  b.origin_x_ = origin_x;
  b.origin_y_ = origin_y;
  b.dx_ = dx;
  b.dy_ = dy;
  b.nx_ = nx;
  b.ny_ = ny;
  b.rho_ = rho;

  for (std::size_t j = 0; j < ny; ++j) {
    const double cy = origin_y + (static_cast<double>(j) + 0.5) * dy;
    for (std::size_t i = 0; i < nx; ++i) {
      const double cx = origin_x + (static_cast<double>(i) + 0.5) * dx;
      double prev_bot = 0.0;
      for (const BarInterval& iv : cells[j * nx + i]) {
        if (!(iv.top > 0.0) || !(iv.bot > iv.top))
          throw std::domain_error(
              "bar body: intervals need 0 < top < bot (depths positive down)");
        if (iv.top < prev_bot)
          throw std::domain_error(
              "bar body: intervals in a column must be sorted and disjoint");
        prev_bot = iv.bot;
        b.col_x_.push_back(cx);
        b.col_y_.push_back(cy);
        b.z_top_.push_back(iv.top);
        b.z_bot_.push_back(iv.bot);
      }
    }
  }
  b.cells_ = std::move(cells);
  return b;
}

double bar_vz(const BarBody& body, const Station& st) {
  const double sum = kernels::bar_sum(
      body.col_x().data(), body.col_y().data(), body.z_top().data(),
      body.z_bot().data(), body.interval_count(), st.x, st.y);
  return kGravity * body.rho() * body.dx() * body.dy() * sum;
}

double bar_vz(const std::vector<BarBody>& bodies, const Station& st) {
  double sum = 0.0;
  for (const BarBody& b : bodies) sum += bar_vz(b, st);
  return sum;
}

BarBody discretize_spheroid(const Spheroid& body, double step) {
  body.validate();
  if (!(step > 0.0) || step > body.a / 10.0)
    throw std::domain_error(
        "discretize_spheroid: step must satisfy 0 < step <= a/10");

  const auto n =
      static_cast<std::size_t>(std::ceil(2.0 * body.a / step - 1e-12));
  const double ox = body.x0 - 0.5 * static_cast<double>(n) * step;
  const double oy = body.y0 - 0.5 * static_cast<double>(n) * step;
  const double c = body.polar_semiaxis();

  std::vector<std::vector<BarInterval>> cells(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double cy = oy + (static_cast<double>(j) + 0.5) * step;
    for (std::size_t i = 0; i < n; ++i) {
      const double cx = ox + (static_cast<double>(i) + 0.5) * step;
      const double rr = (cx - body.x0) * (cx - body.x0) +
                        (cy - body.y0) * (cy - body.y0);
      const double w2 = 1.0 - rr / (body.a * body.a);
      if (w2 <= 0.0) continue;
      const double half = c * std::sqrt(w2);
      // Grazing columns thinner than the depth's rounding granularity
      // would collapse to empty intervals.
      if (half <= body.z0 * 1e-14) continue;
      cells[j * n + i].push_back({body.z0 - half, body.z0 + half});
    }
  }
  return BarBody::from_cells(ox, oy, step, step, n, n, body.rho,
                             std::move(cells));
}

double body_volume(const BarBody& body) {
  double height = 0.0;
  for (std::size_t k = 0; k < body.interval_count(); ++k)
    height += body.z_bot()[k] - body.z_top()[k];
  return body.dx() * body.dy() * height;
}

double body_mass(const BarBody& body) { return body.rho() * body_volume(body); }

void write_bar_body(std::ostream& out, const BarBody& body) {
  using detail::format_double;
  out << "# gravitom barbody v1\n";
  out << "origin " << format_double(body.origin_x()) << ' '
      << format_double(body.origin_y()) << '\n';
  out << "cell " << format_double(body.dx()) << ' '
      << format_double(body.dy()) << '\n';
  out << "grid " << body.nx() << ' ' << body.ny() << '\n';
  out << "rho " << format_double(body.rho()) << '\n';

  std::size_t occupied = 0;
  for (std::size_t j = 0; j < body.ny(); ++j)
    for (std::size_t i = 0; i < body.nx(); ++i)
      if (!body.cell(i, j).empty()) ++occupied;

  out << "columns " << occupied << '\n';
  for (std::size_t j = 0; j < body.ny(); ++j) {
    for (std::size_t i = 0; i < body.nx(); ++i) {
      const auto& cell = body.cell(i, j);
      if (cell.empty()) continue;
      out << i << ' ' << j << ' ' << cell.size();
      for (const BarInterval& iv : cell)
        out << ' ' << format_double(iv.top) << ' ' << format_double(iv.bot);
      out << '\n';
    }
  }
}

void write_bar_body(const std::string& path, const BarBody& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_bar_body(out, body);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

BarBody read_bar_body(std::istream& in, const std::string& name) {
  detail::LineReader r(in, name);
  detail::expect_header(r, "barbody");

  std::string line;
  auto read_keyword = [&](const char* key,
                          std::size_t nvalues) -> std::vector<std::string> {
    if (!r.next_content(line)) r.fail(std::string("expected '") + key + "'");
    auto tok = detail::split_tokens(line);
    if (tok.empty() || tok[0] != key || tok.size() != nvalues + 1)
      r.fail(std::string("expected '") + key + "' with " +
             std::to_string(nvalues) + " value(s)");
    return tok;
  };

  auto tok = read_keyword("origin", 2);
  const double ox = detail::parse_double(r, tok[1], "origin x");
  const double oy = detail::parse_double(r, tok[2], "origin y");
  tok = read_keyword("cell", 2);
  const double dx = detail::parse_double(r, tok[1], "cell dx");
  const double dy = detail::parse_double(r, tok[2], "cell dy");
  tok = read_keyword("grid", 2);
  const long long nx = detail::parse_int(r, tok[1], "grid nx");
  const long long ny = detail::parse_int(r, tok[2], "grid ny");
  if (nx <= 0 || ny <= 0) r.fail("grid counts must be positive");
  tok = read_keyword("rho", 1);
  const double rho = detail::parse_double(r, tok[1], "rho");
  tok = read_keyword("columns", 1);
  const long long ncols = detail::parse_int(r, tok[1], "column count");
  if (ncols < 0) r.fail("column count must be non-negative");

  std::vector<std::vector<BarInterval>> cells(
      static_cast<std::size_t>(nx * ny));
  for (long long k = 0; k < ncols; ++k) {
    if (!r.next_content(line)) r.fail("unexpected end of file in column list");
    tok = detail::split_tokens(line);
    if (tok.size() < 3) r.fail("expected 'i j count top bot ...'");
    const long long i = detail::parse_int(r, tok[0], "column i");
    const long long j = detail::parse_int(r, tok[1], "column j");
    const long long cnt = detail::parse_int(r, tok[2], "interval count");
    if (i < 0 || i >= nx || j < 0 || j >= ny)
      r.fail("column index out of range");
    if (cnt <= 0) r.fail("interval count must be positive");
    if (tok.size() != static_cast<std::size_t>(3 + 2 * cnt))
      r.fail("expected " + std::to_string(2 * cnt) + " depth values");
    auto& cell = cells[static_cast<std::size_t>(j * nx + i)];
    if (!cell.empty()) r.fail("duplicate column entry");
    for (long long t = 0; t < cnt; ++t)
      cell.push_back(
          {detail::parse_double(r, tok[3 + 2 * t], "interval top"),
           detail::parse_double(r, tok[4 + 2 * t], "interval bottom")});
  }
  if (r.next_content(line)) r.fail("trailing content after column list");

  try {
    return BarBody::from_cells(ox, oy, dx, dy, static_cast<std::size_t>(nx),
                               static_cast<std::size_t>(ny), rho,
                               std::move(cells));
  } catch (const std::exception& e) {
    throw std::runtime_error(name + ": " + e.what());
  }
}

BarBody read_bar_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_bar_body(in, path);
}

}  // namespace gravitom
