#include <cmath>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "gravitom/bar_model.hpp"
#include "gravitom/field.hpp"
#include "gravitom/units.hpp"
#include "oracles.hpp"

using namespace gravitom;

namespace {

BarBody single_column(double cx, double cy, double dx, double dy, double rho,
                      double top, double bot) {
  std::vector<std::vector<BarInterval>> cells(1);
  cells[0].push_back({top, bot});
  return BarBody::from_cells(cx - 0.5 * dx, cy - 0.5 * dy, dx, dy, 1, 1, rho,
                             std::move(cells));
}

Spheroid make(double x0, double y0, double z0, double a, double eps,
              double rho) {
  Spheroid b;
  b.x0 = x0;
  b.y0 = y0;
  b.z0 = z0;
  b.a = a;
  b.eps = eps;
  b.rho = rho;
  return b;
}

}  // namespace

TEST_CASE("single bar column matches the frozen line-integral value") {
  const BarBody body = single_column(0.1, 0.2, 0.25, 0.25, 2.0, 1.0, 3.0);
  CHECK(bar_vz(body, {1.0, 1.0}) ==
        doctest::Approx(0.274912448544).epsilon(1e-12));
}

TEST_CASE("bar geometry validation") {
  auto build = [](std::vector<BarInterval> iv) {
    std::vector<std::vector<BarInterval>> cells(1);
    cells[0] = std::move(iv);
    return BarBody::from_cells(0, 0, 0.5, 0.5, 1, 1, 1.0, std::move(cells));
  };
  CHECK_THROWS_AS(build({{0.0, 1.0}}), std::domain_error);   // top must be > 0
  CHECK_THROWS_AS(build({{2.0, 1.0}}), std::domain_error);   // top < bot
  CHECK_THROWS_AS(build({{1.0, 1.0}}), std::domain_error);   // empty interval
  CHECK_THROWS_AS(build({{1.0, 3.0}, {2.0, 4.0}}),
                  std::domain_error);                        // overlap
  CHECK_NOTHROW(build({{1.0, 2.0}, {2.0, 3.0}}));            // touching is fine
  // cells vector must have nx * ny entries
  CHECK_THROWS_AS(BarBody::from_cells(0, 0, 0.5, 0.5, 2, 2, 1.0,
                                      std::vector<std::vector<BarInterval>>(3)),
                  std::invalid_argument);
}

TEST_CASE("discretized spheroid volume approaches the analytic volume") {
  const Spheroid b = make(0, 0, 4, 1.5, 0.8, 2.0);
  const BarBody bars = discretize_spheroid(b, b.a / 40.0);
  CHECK(body_volume(bars) == doctest::Approx(b.volume()).epsilon(0.01));
  CHECK(body_mass(bars) == doctest::Approx(b.mass()).epsilon(0.01));
}

TEST_CASE("coarse steps are rejected") {
  const Spheroid b = make(0, 0, 4, 1.0, 1.0, 1.0);
  CHECK_THROWS_AS(discretize_spheroid(b, 0.2), std::domain_error);
  CHECK_THROWS_AS(discretize_spheroid(b, 0.0), std::domain_error);
  CHECK_NOTHROW(discretize_spheroid(b, 0.1));
}

TEST_CASE("bar sum converges to the closed forms away from the body") {
  oracle::SplitMix rng(3111);
  for (int k = 0; k < 4; ++k) {
    Spheroid b;
    b.x0 = rng.range(-2, 2);
    b.y0 = rng.range(-2, 2);
    b.a = rng.range(0.8, 2.0);
    b.eps = (k % 2 == 0) ? rng.range(0.4, 0.8) : rng.range(1.3, 2.2);
    b.rho = rng.range(1.0, 3.0);
    b.z0 = b.polar_semiaxis() + rng.range(1.0, 3.0);
    const BarBody bars = discretize_spheroid(b, b.a / 40.0);
    for (int s = 0; s < 3; ++s) {
      // Stations at center distance beyond twice the equatorial radius.
      const double ang = rng.range(0, 2 * kPi);
      const double rad = b.a * rng.range(2.1, 4.0);
      const Station st{b.x0 + rad * std::cos(ang),
                       b.y0 + rad * std::sin(ang)};
      CHECK(bar_vz(bars, st) ==
            doctest::Approx(vz_spheroid(b, st)).epsilon(0.01));
    }
  }
}

TEST_CASE("multi-body bar field superposes") {
  const BarBody b1 = single_column(0, 0, 0.5, 0.5, 1.0, 1.0, 2.0);
  const BarBody b2 = single_column(2, 1, 0.5, 0.5, 2.0, 2.0, 5.0);
  const Station st{0.7, 0.9};
  CHECK(bar_vz(std::vector<BarBody>{b1, b2}, st) ==
        doctest::Approx(bar_vz(b1, st) + bar_vz(b2, st)).epsilon(1e-15));
}

TEST_CASE("bar body text round trip preserves geometry and field") {
  const Spheroid b = make(1.0, -0.5, 3.0, 1.2, 0.6, 1.8);
  const BarBody bars = discretize_spheroid(b, 0.12);
  std::ostringstream out;
  write_bar_body(out, bars);
  std::istringstream in(out.str());
  const BarBody back = read_bar_body(in, "roundtrip");
  CHECK(back.nx() == bars.nx());
  CHECK(back.ny() == bars.ny());
  CHECK(back.interval_count() == bars.interval_count());
  const Station st{2.5, 2.5};
  CHECK(bar_vz(back, st) == bar_vz(bars, st));
  CHECK(body_volume(back) == body_volume(bars));
}

TEST_CASE("bar body reader reports malformed input") {
  {
    std::istringstream in("# gravitom barbody v1\nnot-a-keyword 1 2\n");
    CHECK_THROWS_WITH_AS(read_bar_body(in, "bad.bars"),
                         doctest::Contains("bad.bars:"), std::runtime_error);
  }
  {
    std::istringstream in("# gravitom grid v1\n");
    CHECK_THROWS_AS(read_bar_body(in, "bad.bars"), std::runtime_error);
  }
}
