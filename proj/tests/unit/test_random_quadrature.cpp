#include <doctest.h>

#include <cmath>
#include <set>

#include "stablelike/errors.hpp"
#include "stablelike/quadrature.hpp"
#include "stablelike/random.hpp"

using namespace stablelike;

TEST_CASE("split streams are deterministic and distinct") {
  const RandomStream master(42);
  RandomStream a = master.split(3), b = master.split(3), c = master.split(4);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  RandomStream a2 = master.split(3);
  CHECK(a2.next_u64() != c.next_u64());
  // Splitting does not advance the parent.
  RandomStream m1(42), m2(42);
  (void)m1.split(9);
  CHECK(m1.next_u64() == m2.next_u64());
}

TEST_CASE("derived seeds do not collide on a small grid") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 20; ++m)
    for (std::uint64_t i = 0; i < 200; ++i) seen.insert(derive_seed(m, i));
  CHECK(seen.size() == 4000);
}

TEST_CASE("uniform stays in the open unit interval") {
  RandomStream r(1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / 1e5 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("adaptive quadrature on smooth and peaked integrands") {
  QuadConfig cfg;
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 10.0, cfg).value ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-13));
  CHECK(integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, cfg).value ==
        doctest::Approx(2.0 * std::atan(1.0 / 1e-2) / 1e-2).epsilon(1e-10));
}

TEST_CASE("quadrature budget failure carries the residual") {
  QuadConfig cfg;
  cfg.max_subdivisions = 2;
  cfg.abs_tol = 1e-15;
  try {
    integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, cfg);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("Wynn epsilon accelerates an alternating series") {
  std::vector<double> partial;
  double s = 0.0;
  for (int k = 1; k <= 12; ++k) {
    s += (k % 2 ? 1.0 : -1.0) / k;
    partial.push_back(s);
  }
  const auto r = wynn_epsilon(partial);
  CHECK(std::abs(r.value - std::log(2.0)) < 1e-8);
  CHECK(std::abs(partial.back() - std::log(2.0)) > 1e-2);
}
