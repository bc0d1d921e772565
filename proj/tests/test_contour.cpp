#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "gravitom/contour.hpp"
#include "gravitom/grid.hpp"

using namespace gravitom;

namespace {

// Two unit-height bumps with a shallow saddle between them.
FieldGrid two_bumps() {
  FieldGrid g;
  g.spec = {0, 10, 0, 10, 41, 41};
  g.values.resize(g.spec.nx * g.spec.ny);
  for (std::size_t j = 0; j < g.spec.ny; ++j) {
    for (std::size_t i = 0; i < g.spec.nx; ++i) {
      const double x = g.node_x(i), y = g.node_y(j);
      g.at(i, j) = std::exp(-((x - 3) * (x - 3) + (y - 5) * (y - 5))) +
                   std::exp(-((x - 7) * (x - 7) + (y - 5) * (y - 5)));
    }
  }
  return g;
}

// Every contour vertex sits on a grid edge; re-interpolating the two node
// values at its position must recover the level.
void check_on_level(const FieldGrid& g, const ContourLine& line) {
  const double dx = g.spec.dx(), dy = g.spec.dy();
  for (const Station& p : line.points) {
    const double fi = (p.x - g.spec.x0) / dx;
    const double fj = (p.y - g.spec.y0) / dy;
    const double ri = std::round(fi), rj = std::round(fj);
    double interp;
    if (std::abs(fj - rj) < 1e-9) {
      // Horizontal edge: interpolate between (i, j) and (i+1, j).
      const auto j = static_cast<std::size_t>(rj);
      const auto i = static_cast<std::size_t>(std::floor(fi + 1e-12));
      const double t = fi - static_cast<double>(i);
      interp = g.at(i, j) + t * (g.at(i + 1, j) - g.at(i, j));
    } else {
      REQUIRE(std::abs(fi - ri) < 1e-9);
      const auto i = static_cast<std::size_t>(ri);
      const auto j = static_cast<std::size_t>(std::floor(fj + 1e-12));
      const double t = fj - static_cast<double>(j);
      interp = g.at(i, j) + t * (g.at(i, j + 1) - g.at(i, j));
    }
    CHECK(interp == doctest::Approx(line.level).epsilon(1e-9));
  }
}

}  // namespace

TEST_CASE("contour vertices interpolate back to the level") {
  const FieldGrid g = two_bumps();
  const auto lines = extract_contours(g, {0.2, 0.5, 0.8});
  REQUIRE(!lines.empty());
  for (const ContourLine& line : lines) check_on_level(g, line);
}

TEST_CASE("a level between saddle and peaks yields two closed loops") {
  const FieldGrid g = two_bumps();
  // Saddle value at (5, 5) is 2*exp(-4) ~ 0.037; peaks are ~1.
  const auto lines = extract_contours(g, {0.5});
  REQUIRE(lines.size() == 2);
  for (const ContourLine& line : lines) {
    CHECK(line.closed);
    CHECK(line.level == 0.5);
    REQUIRE(line.points.size() >= 4);
    CHECK(line.points.front().x == line.points.back().x);
    CHECK(line.points.front().y == line.points.back().y);
  }
  // One loop surrounds each peak: their centroids split left/right.
  double cx0 = 0, cx1 = 0;
  for (const Station& p : lines[0].points) cx0 += p.x;
  for (const Station& p : lines[1].points) cx1 += p.x;
  cx0 /= static_cast<double>(lines[0].points.size());
  cx1 /= static_cast<double>(lines[1].points.size());
  CHECK(std::abs(std::min(cx0, cx1) - 3.0) < 0.5);
  CHECK(std::abs(std::max(cx0, cx1) - 7.0) < 0.5);
}

TEST_CASE("a level below the saddle yields one loop around both bumps") {
  const FieldGrid g = two_bumps();
  const auto lines = extract_contours(g, {0.02});
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
}

TEST_CASE("levels outside the value range produce nothing") {
  const FieldGrid g = two_bumps();
  CHECK(extract_contours(g, {5.0}).empty());
  CHECK(extract_contours(g, {-1.0}).empty());
  CHECK(extract_contours(g, {}).empty());
  CHECK_THROWS_AS(
      extract_contours(g, {std::numeric_limits<double>::infinity()}),
      std::domain_error);
}

TEST_CASE("a ramp field produces a straight open polyline") {
  FieldGrid g;
  g.spec = {0, 4, 0, 3, 5, 4};
  g.values.resize(20);
  for (std::size_t j = 0; j < g.spec.ny; ++j)
    for (std::size_t i = 0; i < g.spec.nx; ++i)
      g.at(i, j) = g.node_x(i);
  const auto lines = extract_contours(g, {2.5});
  REQUIRE(lines.size() == 1);
  const ContourLine& line = lines[0];
  CHECK(!line.closed);
  REQUIRE(line.points.size() == 4);  // one crossing per grid row
  for (const Station& p : line.points)
    CHECK(p.x == doctest::Approx(2.5).epsilon(1e-12));
  // Endpoints reach the grid's y bounds.
  double ylo = line.points.front().y, yhi = ylo;
  for (const Station& p : line.points) {
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  CHECK(ylo == doctest::Approx(0.0));
  CHECK(yhi == doctest::Approx(3.0));
}

TEST_CASE("contour writer emits the documented format") {
  const FieldGrid g = two_bumps();
  const auto lines = extract_contours(g, {0.5});
  std::ostringstream out;
  write_contours(out, lines);
  const std::string text = out.str();
  CHECK(text.rfind("# gravitom contours v1\n", 0) == 0);
  CHECK(text.find("polyline level 0.5 points ") != std::string::npos);
  CHECK(text.find(" closed 1\n") != std::string::npos);
}
