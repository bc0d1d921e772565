#include "gravitom/field.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "gravitom/units.hpp"
#include "text_io.hpp"

namespace gravitom {

namespace {

// Guard against a vanishing confocal root; unreachable for valid buried
// bodies (the root is bounded below by (z0/r)^2 like terms) but keeps the
// divisions safe against pathological inputs.
constexpr double kRootFloor = 1e-30;

double center_distance(const Spheroid& body, const Station& st) {
  const double dx = st.x - body.x0;
  const double dy = st.y - body.y0;
  return std::sqrt(dx * dx + dy * dy + body.z0 * body.z0);
}

// Exterior field of a homogeneous sphere: the whole mass acts from the
// center.
double sphere_field(double radius, double rho, double x0, double y0,
                    double z0, const Station& st) {
  const double dx = st.x - x0;
  const double dy = st.y - y0;
  const double r = std::sqrt(dx * dx + dy * dy + z0 * z0);
  const double mass = rho * (4.0 / 3.0) * kPi * radius * radius * radius;
  return kGravity * mass * z0 / (r * r * r);
}

}  // namespace

double Spheroid::volume() const { return (4.0 / 3.0) * kPi * a * a * a * eps; }

double Spheroid::mass() const { return rho * volume(); }

void Spheroid::validate() const {
  if (!(a > 0.0)) throw std::domain_error("spheroid: semiaxis a must be > 0");
  if (!(eps > 0.0))
    throw std::domain_error("spheroid: axis ratio eps must be > 0");
  if (!(rho > 0.0)) throw std::domain_error("spheroid: density must be > 0");
  if (!(z0 > polar_semiaxis()))
    throw std::domain_error(
        "spheroid: body breaches the surface (z0 must exceed eps * a)");
}

double vz_sphere(const Spheroid& body, const Station& st) {
  body.validate();
  if (body.eps != 1.0)
    throw std::domain_error("vz_sphere: axis ratio must equal 1");
  return sphere_field(body.a, body.rho, body.x0, body.y0, body.z0, st);
}

double vz_oblate(const Spheroid& body, const Station& st) {
  body.validate();
  if (!(body.eps < 1.0))
    throw std::domain_error("vz_oblate: axis ratio must be < 1");
  const double e2 = (1.0 - body.eps) * (1.0 + body.eps);
  const double e = std::sqrt(e2);
  const double r = center_distance(body, st);
  const double q = e * body.a / r;
  const double q2 = q * q;
  const double zr = body.z0 / r;
  const double u = 1.0 - q2;
  const double tau = 0.5 * (u + std::sqrt(u * u + 4.0 * q2 * zr * zr));
  if (!(tau > kRootFloor))
    throw std::domain_error("vz_oblate: degenerate geometry");
  const double p = q / std::sqrt(tau);
  const double shape = (p - std::atan(p)) / (e2 * e);
  return 4.0 * kPi * kGravity * body.rho * body.eps * shape * body.z0;
}

double vz_prolate(const Spheroid& body, const Station& st) {
  body.validate();
  if (!(body.eps > 1.0))
    throw std::domain_error("vz_prolate: axis ratio must be > 1");
  const double e2 = (body.eps - 1.0) * (body.eps + 1.0);
  const double e = std::sqrt(e2);
  const double dx = st.x - body.x0;
  const double dy = st.y - body.y0;
  const double s2 = dx * dx + dy * dy;
  const double r2 = s2 + body.z0 * body.z0;
  const double r = std::sqrt(r2);
  const double q = e * body.a / r;
  const double q2 = q * q;
  const double u = 1.0 - q2;
  const double t = 0.5 * (u + std::sqrt(u * u + 4.0 * q2 * s2 / r2));
  if (!(t > kRootFloor))
    throw std::domain_error("vz_prolate: degenerate geometry");
  const double p = q / std::sqrt(t);
  const double w = std::sqrt(1.0 + p * p);
  const double shape = (std::log(p + w) - p / w) / (e2 * e);
  return 4.0 * kPi * kGravity * body.rho * body.eps * shape * body.z0;
}

double vz_spheroid(const Spheroid& body, const Station& st) {
  body.validate();
  if (std::abs(body.eps - 1.0) < kSphereBand) {
    const double radius = body.a * std::cbrt(body.eps);
    if (!(body.z0 > radius))
      throw std::domain_error(
          "vz_spheroid: near-sphere body grazes the surface");
    return sphere_field(radius, body.rho, body.x0, body.y0, body.z0, st);
  }
  return body.eps < 1.0 ? vz_oblate(body, st) : vz_prolate(body, st);
}

double point_mass_vz(double mass, double x0, double y0, double z0,
                     const Station& st) {
  if (!(z0 > 0.0))
    throw std::domain_error("point_mass_vz: depth must be > 0");
  const double dx = st.x - x0;
  const double dy = st.y - y0;
  const double r = std::sqrt(dx * dx + dy * dy + z0 * z0);
  return kGravity * mass * z0 / (r * r * r);
}

double vz_deposit(const Deposit& deposit, const Station& st) {
  double sum = 0.0;
  for (const Spheroid& body : deposit.bodies) sum += vz_spheroid(body, st);
  return sum;
}

void write_deposit(std::ostream& out, const Deposit& deposit) {
  using detail::format_double;
  out << "# gravitom deposit v1\n";
  out << "# x0_km y0_km z0_km a_km eps rho_g_cm3\n";
  for (const Spheroid& b : deposit.bodies)
    out << format_double(b.x0) << ' ' << format_double(b.y0) << ' '
        << format_double(b.z0) << ' ' << format_double(b.a) << ' '
        << format_double(b.eps) << ' ' << format_double(b.rho) << '\n';
}

void write_deposit(const std::string& path, const Deposit& deposit) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_deposit(out, deposit);
  if (!out.flush()) throw std::runtime_error(path + ": write failed");
}

Deposit read_deposit(std::istream& in, const std::string& name) {
  detail::LineReader r(in, name);
  detail::expect_header(r, "deposit");
  Deposit deposit;
  std::string line;
  while (r.next_content(line)) {
    const auto tok = detail::split_tokens(line);
    if (tok.size() != 6)
      r.fail("expected 6 values (x0 y0 z0 a eps rho), got " +
             std::to_string(tok.size()));
    Spheroid b;
    b.x0 = detail::parse_double(r, tok[0], "x0");
    b.y0 = detail::parse_double(r, tok[1], "y0");
    b.z0 = detail::parse_double(r, tok[2], "z0");
    b.a = detail::parse_double(r, tok[3], "a");
    b.eps = detail::parse_double(r, tok[4], "eps");
    b.rho = detail::parse_double(r, tok[5], "rho");
    try {
      b.validate();
    } catch (const std::exception& e) {
      r.fail(e.what());
    }
    deposit.bodies.push_back(b);
  }
  if (deposit.bodies.empty()) r.fail("deposit holds no bodies");
  return deposit;
}

Deposit read_deposit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  return read_deposit(in, path);
}

}  // namespace gravitom
