#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "gravitom/field.hpp"
#include "gravitom/grid.hpp"
#include "gravitom/survey.hpp"

using namespace gravitom;

namespace {

Deposit one_body() {
  Deposit d;
  d.bodies.push_back({5.0, 5.0, 4.0, 2.0, 0.7, 1.8});
  return d;
}

}  // namespace

TEST_CASE("grid node coordinates follow the spec") {
  GridSpec spec{1.0, 3.0, -2.0, 2.0, 5, 9};
  CHECK(spec.dx() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(spec.dy() == doctest::Approx(0.5).epsilon(1e-15));
  FieldGrid g;
  g.spec = spec;
  g.values.assign(spec.nx * spec.ny, 0.0);
  CHECK(g.node_x(0) == 1.0);
  CHECK(g.node_x(4) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(g.node_y(8) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("dense forward grid equals the forward model at every node") {
  const Deposit truth = one_body();
  const GridSpec spec{0, 10, 0, 10, 11, 11};
  const FieldGrid g = grid_field(truth, spec);
  REQUIRE(g.values.size() == 121);
  for (std::size_t j = 0; j < spec.ny; ++j)
    for (std::size_t i = 0; i < spec.nx; ++i)
      CHECK(g.at(i, j) ==
            vz_deposit(truth, Station{g.node_x(i), g.node_y(j)}));
}

TEST_CASE("interpolated survey grid stays between sample extremes") {
  const Deposit truth = one_body();
  const auto stations = lattice_stations(6, 6, 0, 10, 0, 10, 0.3, 4, false);
  const Survey survey = synth_survey(truth, stations, 0.0, 4);
  const FieldGrid g = grid_survey(survey, GridSpec{0, 10, 0, 10, 21, 21},
                                  2.0, 0.5);
  double lo = survey.samples[0].vz, hi = lo;
  for (const FieldSample& s : survey.samples) {
    lo = std::min(lo, s.vz);
    hi = std::max(hi, s.vz);
  }
  for (double v : g.values) {
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
}

TEST_CASE("zero smoothing pins nodes that coincide with samples") {
  Survey survey;
  survey.samples = {{{0.0, 0.0}, 3.0}, {{1.0, 0.0}, 5.0}, {{0.0, 1.0}, 9.0}};
  const FieldGrid g =
      grid_survey(survey, GridSpec{0, 1, 0, 1, 2, 2}, 2.0, 0.0);
  CHECK(g.at(0, 0) == 3.0);
  CHECK(g.at(1, 0) == 5.0);
  CHECK(g.at(0, 1) == 9.0);
  // The remaining corner is a weighted blend, strictly inside the range.
  CHECK(g.at(1, 1) > 3.0);
  CHECK(g.at(1, 1) < 9.0);
}

TEST_CASE("survey grid rejects bad arguments") {
  Survey empty;
  GridSpec spec{0, 1, 0, 1, 2, 2};
  CHECK_THROWS_AS(grid_survey(empty, spec), std::invalid_argument);
  Survey one;
  one.samples = {{{0.5, 0.5}, 1.0}};
  CHECK_THROWS_AS(grid_survey(one, spec, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(grid_survey(one, spec, 2.0, -1.0), std::invalid_argument);
}

TEST_CASE("bounding-box spec expands by the margin fraction") {
  std::vector<Station> st = {{1.0, 2.0}, {5.0, 2.0}, {3.0, 8.0}};
  const GridSpec spec = bounds_spec(st, 41, 61, 0.10);
  CHECK(spec.x0 == doctest::Approx(1.0 - 0.4).epsilon(1e-15));
  CHECK(spec.x1 == doctest::Approx(5.0 + 0.4).epsilon(1e-15));
  CHECK(spec.y0 == doctest::Approx(2.0 - 0.6).epsilon(1e-15));
  CHECK(spec.y1 == doctest::Approx(8.0 + 0.6).epsilon(1e-15));
  CHECK(spec.nx == 41);
  CHECK(spec.ny == 61);
  CHECK_THROWS_AS(bounds_spec({}, 10, 10), std::invalid_argument);
  // Collinear stations give a degenerate extent in one axis.
  std::vector<Station> line = {{0.0, 1.0}, {4.0, 1.0}};
  CHECK_THROWS_AS(bounds_spec(line, 10, 10), std::domain_error);
}

TEST_CASE("grid validation catches shape and value problems") {
  FieldGrid g;
  g.spec = {0, 1, 0, 1, 3, 3};
  g.values.assign(8, 0.0);
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g.values.assign(9, 0.0);
  CHECK_NOTHROW(g.validate());
  g.values[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  GridSpec bad{0, 1, 0, 1, 1, 3};
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
}

TEST_CASE("grid text round trip is byte-stable") {
  const Deposit truth = one_body();
  const FieldGrid g = grid_field(truth, GridSpec{0.5, 9.5, -1, 11, 7, 9});

  std::ostringstream first;
  write_grid(first, g);
  std::istringstream in(first.str());
  const FieldGrid back = read_grid(in, "roundtrip");

  CHECK(back.spec.nx == g.spec.nx);
  CHECK(back.spec.ny == g.spec.ny);
  CHECK(back.spec.x0 == g.spec.x0);
  CHECK(back.spec.y1 == g.spec.y1);
  REQUIRE(back.values.size() == g.values.size());
  for (std::size_t i = 0; i < g.values.size(); ++i)
    CHECK(back.values[i] == g.values[i]);

  std::ostringstream second;
  write_grid(second, back);
  CHECK(first.str() == second.str());
}

TEST_CASE("grid reader rejects malformed input") {
  {
    // Values before the extent headers.
    std::istringstream in("# gravitom grid v1\n1 2 3\n");
    CHECK_THROWS_WITH_AS(read_grid(in, "g.grid"),
                         doctest::Contains("g.grid:2"), std::runtime_error);
  }
  {
    // Row with the wrong number of values.
    std::istringstream in(
        "# gravitom grid v1\n# x_km 0 1 3\n# y_km 0 1 2\n1 2 3\n4 5\n");
    CHECK_THROWS_WITH_AS(read_grid(in, "g.grid"),
                         doctest::Contains("g.grid:5"), std::runtime_error);
  }
  {
    // Too few rows overall: validation failure is tagged with the name.
    std::istringstream in(
        "# gravitom grid v1\n# x_km 0 1 3\n# y_km 0 1 2\n1 2 3\n");
    CHECK_THROWS_WITH_AS(read_grid(in, "g.grid"),
                         doctest::Contains("g.grid"), std::runtime_error);
  }
  {
    std::istringstream in("# gravitom deposit v1\n");
    CHECK_THROWS_AS(read_grid(in, "g.grid"), std::runtime_error);
  }
}
