#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "gravitom/kernels.hpp"
#include "oracles.hpp"

using namespace gravitom;

namespace {

struct Arrays {
  std::vector<double> cx, cy, top, bot;
};

Arrays random_arrays(std::size_t n, unsigned long long seed) {
  oracle::SplitMix rng(seed);
  Arrays a;
  for (std::size_t i = 0; i < n; ++i) {
    a.cx.push_back(rng.range(-10, 10));
    a.cy.push_back(rng.range(-10, 10));
    const double top = rng.range(0.1, 5.0);
    a.top.push_back(top);
    a.bot.push_back(top + rng.range(0.1, 5.0));
  }
  return a;
}

// Independent accumulation in extended precision.
long double reference_sum(const Arrays& a, double sx, double sy) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < a.cx.size(); ++i) {
    const long double dx = static_cast<long double>(sx) - a.cx[i];
    const long double dy = static_cast<long double>(sy) - a.cy[i];
    const long double d2 = dx * dx + dy * dy;
    sum += 1.0L / std::sqrt(d2 + static_cast<long double>(a.top[i]) * a.top[i]) -
           1.0L / std::sqrt(d2 + static_cast<long double>(a.bot[i]) * a.bot[i]);
  }
  return sum;
}

}  // namespace

TEST_CASE("scalar kernel matches extended-precision reference") {
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3},
                        std::size_t{4}, std::size_t{7}, std::size_t{64},
                        std::size_t{1001}}) {
    const Arrays a = random_arrays(n, 100 + n);
    const double got = kernels::bar_sum_scalar(
        a.cx.data(), a.cy.data(), a.top.data(), a.bot.data(), n, 1.5, -2.5);
    const double want = static_cast<double>(reference_sum(a, 1.5, -2.5));
    if (n == 0) {
      CHECK(got == 0.0);
    } else {
      CHECK(got == doctest::Approx(want).epsilon(1e-13));
    }
  }
}

#if defined(GRAVITOM_HAVE_AVX2)
TEST_CASE("vector kernel agrees with the scalar kernel") {
  if (!kernels::supported(kernels::Isa::avx2)) {
    MESSAGE("avx2 not supported by this CPU; skipping equivalence check");
    return;
  }
  for (std::size_t n = 0; n <= 33; ++n) {  // covers every tail length
    const Arrays a = random_arrays(n, 7000 + n);
    const double scalar = kernels::bar_sum_scalar(
        a.cx.data(), a.cy.data(), a.top.data(), a.bot.data(), n, -0.7, 3.1);
    const double vec = kernels::bar_sum_avx2(
        a.cx.data(), a.cy.data(), a.top.data(), a.bot.data(), n, -0.7, 3.1);
    CHECK(vec == doctest::Approx(scalar).epsilon(1e-13));
  }
  const Arrays big = random_arrays(4096, 42);
  const double scalar = kernels::bar_sum_scalar(
      big.cx.data(), big.cy.data(), big.top.data(), big.bot.data(), 4096,
      0.0, 0.0);
  const double vec = kernels::bar_sum_avx2(
      big.cx.data(), big.cy.data(), big.top.data(), big.bot.data(), 4096,
      0.0, 0.0);
  CHECK(vec == doctest::Approx(scalar).epsilon(1e-12));
}
#endif

TEST_CASE("implementation selection and environment override") {
  // Scalar is always available.
  CHECK(kernels::supported(kernels::Isa::scalar));
  kernels::select(kernels::Isa::scalar);
  CHECK(kernels::active() == kernels::Isa::scalar);
  CHECK(std::string(kernels::isa_name(kernels::Isa::scalar)) == "scalar");

  if (kernels::supported(kernels::Isa::avx2)) {
    kernels::select(kernels::Isa::avx2);
    CHECK(kernels::active() == kernels::Isa::avx2);
  } else {
    CHECK_THROWS_AS(kernels::select(kernels::Isa::avx2), std::runtime_error);
  }

  ::setenv("GRAVITOM_SIMD", "scalar", 1);
  kernels::select_auto();
  CHECK(kernels::active() == kernels::Isa::scalar);

  ::setenv("GRAVITOM_SIMD", "definitely-not-an-isa", 1);
  CHECK_THROWS_AS(kernels::select_auto(), std::runtime_error);

  ::unsetenv("GRAVITOM_SIMD");
  kernels::select_auto();  // widest supported
  const Arrays a = random_arrays(37, 9);
  const double dispatched = kernels::bar_sum(
      a.cx.data(), a.cy.data(), a.top.data(), a.bot.data(), 37, 2.0, 2.0);
  const double scalar = kernels::bar_sum_scalar(
      a.cx.data(), a.cy.data(), a.top.data(), a.bot.data(), 37, 2.0, 2.0);
  CHECK(dispatched == doctest::Approx(scalar).epsilon(1e-13));
}
