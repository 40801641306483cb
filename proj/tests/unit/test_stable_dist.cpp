#include <doctest.h>

#include <cmath>

#include "stablelike/errors.hpp"
#include "stablelike/stable_dist.hpp"
#include "stablelike/stats.hpp"

using namespace stablelike;

namespace {

const double pi = std::acos(-1.0);

// Power series of the unit density around 0, alpha > 1.
double small_y_series(double alpha, double y) {
  double s = 0.0;
  for (int k = 0; k < 80; ++k) {
    const double t = std::exp(std::lgamma((2.0 * k + 1.0) / alpha) - std::lgamma(2.0 * k + 1.0) +
                              2.0 * k * std::log(std::abs(y)));
    s += (k % 2 ? -t : t);
  }
  return s / (pi * alpha);
}

// Asymptotic series of the unit density, alpha < 1 (convergent there).
double large_y_series(double alpha, double y) {
  double s = 0.0;
  for (int k = 1; k < 60; ++k) {
    const double t = std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0) -
                              (alpha * k + 1.0) * std::log(y)) *
                     std::sin(pi * alpha * k / 2.0);
    s += (k % 2 ? t : -t);
  }
  return s / pi;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(StableParams::make(0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(StableParams::make(2.1, 1.0), PreconditionError);
  CHECK_THROWS_AS(StableParams::make(1.0, -1.0), PreconditionError);
  CHECK_THROWS_AS(tail_constant(StableParams::make(2.0, 1.0)), PreconditionError);
}

TEST_CASE("characteristic function and tail constant") {
  const auto p = StableParams::make(1.3, 0.7);
  CHECK(cf(p, 0.0) == 1.0);
  CHECK(cf(p, 2.0) == doctest::Approx(std::exp(-0.7 * std::pow(2.0, 1.3))));
  CHECK(cf(p, -2.0) == cf(p, 2.0));
  CHECK(tail_constant(StableParams::make(1.0, 2.0)) == doctest::Approx(2.0 / pi));
  // Continuity across alpha = 1.
  CHECK(tail_constant(StableParams::make(1.0 + 1e-7, 1.0)) == doctest::Approx(1.0 / pi).epsilon(1e-6));
}

TEST_CASE("Cauchy and Gaussian closed forms") {
  const auto c = StableParams::make(1.0, 1.5);
  const auto g = StableParams::make(2.0, 0.8);
  for (double y : {0.0, 0.3, 1.0, 4.0, 25.0}) {
    CHECK(pdf(c, y) == doctest::Approx(1.5 / (pi * (1.5 * 1.5 + y * y))).epsilon(1e-9));
    CHECK(cdf(c, y) == doctest::Approx(0.5 + std::atan(y / 1.5) / pi).epsilon(1e-9));
    const double exact = std::exp(-y * y / 3.2) / std::sqrt(3.2 * pi);
    CHECK(std::abs(pdf(g, y) - exact) <= 1e-8 * exact + 1e-12);
    CHECK(cdf(g, y) == doctest::Approx(0.5 * std::erfc(-y / std::sqrt(3.2))).epsilon(1e-9));
  }
}

TEST_CASE("pdf at zero matches Gamma(1 + 1/alpha) / (pi gamma^{1/alpha})") {
  for (double a : {0.5, 0.7, 1.2, 1.5, 1.9}) {
    const auto p = StableParams::make(a, 1.7);
    CHECK(pdf(p, 0.0) == doctest::Approx(std::tgamma(1.0 + 1.0 / a) / (pi * std::pow(1.7, 1.0 / a))).epsilon(1e-9));
  }
}

TEST_CASE("pdf against independent series oracles") {
  for (double y : {0.2, 0.8, 1.5}) CHECK(pdf(StableParams::make(1.5, 1.0), y) == doctest::Approx(small_y_series(1.5, y)).epsilon(1e-8));
  for (double y : {20.0, 100.0, 1000.0})
    CHECK(pdf(StableParams::make(0.6, 1.0), y) == doctest::Approx(large_y_series(0.6, y)).epsilon(1e-6));
}

TEST_CASE("zolotarev tail series brackets the density") {
  const auto p = StableParams::make(0.7, 1.0);
  const auto s = zolotarev_tail_series(p, 50.0, 8);
  CHECK(std::abs(s.value - pdf(p, 50.0)) <= s.error_bound + 1e-12);
}

TEST_CASE("cdf symmetry and monotonicity") {
  const auto p = StableParams::make(0.8, 1.0);
  CHECK(cdf(p, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  double prev = 0.0;
  for (double y = -30.0; y <= 30.0; y += 1.5) {
    const double F = cdf(p, y);
    CHECK(F >= prev - 1e-12);
    CHECK(F + cdf(p, -y) == doctest::Approx(1.0).epsilon(1e-10));
    prev = F;
  }
}

TEST_CASE("pdf is non-negative in the Gaussian far tail") {
  const auto g = StableParams::make(2.0, 1.0);
  for (double y = 8.0; y < 40.0; y += 0.7) CHECK(pdf(g, y) >= 0.0);
}

TEST_CASE("CDF table agrees with direct quadrature and inverts") {
  const StableCdfTable t(StableParams::make(1.2, 2.0));
  for (double y : {-50.0, -3.0, -0.4, 0.0, 0.9, 7.0, 400.0})
    // Beyond the table nodes the tail asymptotic takes over.
    CHECK(std::abs(t(y) - cdf(StableParams::make(1.2, 2.0), y)) < 1e-7);
  for (double q : {0.01, 0.3, 0.5, 0.77, 0.999}) CHECK(t(t.quantile(q)) == doctest::Approx(q).epsilon(1e-9));
}

TEST_CASE("sampler law matches the CDF") {
  const auto p = StableParams::make(0.9, 0.5);
  const StableSampler s(p);
  RandomStream rng(17);
  std::vector<double> xs(20000);
  for (auto& x : xs) x = s(rng);
  const StableCdfTable t(p);
  CHECK(ks_statistic(xs, [&](double y) { return t(y); }) < 0.015);
  RandomStream r1(5), r2(5);
  CHECK(sample(p, r1) == s(r2));
}
