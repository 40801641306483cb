#include <doctest.h>

#include <cmath>

#include "stablelike/chain_models.hpp"
#include "stablelike/errors.hpp"
#include "stablelike/stats.hpp"

using namespace stablelike;

namespace {
const double pi = std::acos(-1.0);
}

TEST_CASE("profiles") {
  const auto s = Profile::smoothed_step(0.6, 1.6, 5.0);
  CHECK(s(-5.0) == 0.6);
  CHECK(s(-100.0) == 0.6);
  CHECK(s(5.0) == 1.6);
  CHECK(s(0.0) == doctest::Approx(1.1));
  // Zero slope at the ends of the blend.
  CHECK(std::abs((s(-5.0 + 1e-6) - s(-5.0)) / 1e-6) < 1e-4);
  for (double x = -6.0; x <= 6.0; x += 0.1) CHECK(s(x) <= 1.6 + 1e-15);

  const auto st = Profile::step(0.7, 1.3);
  CHECK(st(-1e-9) == 0.7);
  CHECK(st(0.0) == 1.3);

  const auto p = Profile::periodic_plateau(2.0, 0.8, 1.4, 0.5, 0.1);
  CHECK(p.period().value() == 2.0);
  CHECK(p.lower() == 0.8);
  CHECK(p.upper() == 1.4);
  REQUIRE(p.plateau());
  CHECK(p.plateau()->value == 0.8);
  CHECK(p.plateau()->length == doctest::Approx(1.0));
  for (double x = -3.0; x < 3.0; x += 0.37) CHECK(p(x + 2.0) == doctest::Approx(p(x)).epsilon(1e-12));

  CHECK_THROWS_AS(Profile::periodic_table(1.0, {1.0}, std::nullopt), PreconditionError);
}

TEST_CASE("periodic Pareto family is exact") {
  const auto spec = make_periodic_pareto(Profile::constant(1.0), 1.0);
  CHECK(transition_density(spec, 0.3, 0.3 + 0.5) == doctest::Approx(0.25));
  CHECK(jump_tail_constant(spec, 0.0) == doctest::Approx(0.25));
  for (double a : {0.5, 1.0, 1.7}) {
    CHECK(pareto_scale(a) == doctest::Approx(a / (2.0 * (a + 1.0))));
    for (double y : {1.0, 2.0, 17.0}) CHECK(pareto_density(a, y) * std::pow(y, a + 1.0) / pareto_scale(a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pareto_cdf(a, 1.0) - pareto_cdf(a, -1.0) == doctest::Approx(a / (a + 1.0)));
  }
  const auto pp = make_periodic_pareto(Profile::periodic_plateau(2.0, 0.8, 1.4, 0.5, 0.1), 2.0);
  for (double x : {0.1, 1.3, 1.9})
    for (double v : {0.4, 3.0}) CHECK(transition_density(pp, x + 2.0, x + 2.0 + v) == doctest::Approx(transition_density(pp, x, x + v)).epsilon(1e-12));
  CHECK_THROWS_AS(make_periodic_pareto(Profile::step(0.8, 1.2), 2.0), PreconditionError);
}

TEST_CASE("flat-part mass of the periodic Pareto jump") {
  const auto spec = make_periodic_pareto(Profile::constant(1.5), 1.0);
  RandomStream rng(3);
  const int n = 200000;
  int inside = 0;
  for (int i = 0; i < n; ++i) inside += std::abs(transition_sample(spec, 0.2, rng) - 0.2) <= 1.0;
  const double p = 1.5 / 2.5;
  CHECK(std::abs(inside / double(n) - p) < 3.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("step chain densities") {
  const auto spec = make_step_chain(0.7, 1.0, 1.0, 1.0);
  CHECK(transition_density(spec, 1.0, 1.0) == doctest::Approx(1.0 / pi).epsilon(1e-10));
  CHECK(transition_density(spec, 2.0, 2.5) == doctest::Approx(transition_density(spec, 2.0, 1.5)));
  CHECK(transition_density(spec, -3.0, -3.0) == transition_density(spec, -0.1, -0.1));
  CHECK(jump_alpha(spec, -1.0) == 0.7);
  CHECK(jump_alpha(spec, 1.0) == 1.0);
}

TEST_CASE("step chain empirical characteristic function from x = -5") {
  const auto spec = make_step_chain(1.5, 0.7, 1.0, 2.0);
  RandomStream rng(11);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(transition_sample(spec, -5.0, rng) + 5.0);
    s += c;
    s2 += c * c;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - std::exp(-1.0)) < 3.0 * se);
}

TEST_CASE("discrete pmf") {
  const Pmf p = make_discrete_pmf(0.8, 200);
  CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.prob(0) == 0.0);
  CHECK(p.prob(1) / p.prob(2) == doctest::Approx(std::pow(2.0, 1.8)));
  CHECK(p.prob(-7) == p.prob(7));
  CHECK(p.prob(1000) == doctest::Approx(p.tail_kappa() * std::pow(1000.0, -1.8)));
  RandomStream rng(9);
  std::vector<double> xs(1000000);
  for (auto& x : xs) x = p.sample(rng);
  CHECK(hill_estimate(xs, 5000) == doctest::Approx(0.8).epsilon(0.0625));
}

TEST_CASE("discrete chain uses the residue of the state") {
  const auto spec = make_discrete_chain({0.7, 1.5}, 100);
  CHECK(jump_alpha(spec, 4.0) == 0.7);
  CHECK(jump_alpha(spec, -3.0) == 1.5);
  CHECK_THROWS(transition_density(spec, 0.0, 1.0));
}

TEST_CASE("condition checks") {
  const auto pp = make_periodic_pareto(Profile::periodic_plateau(2.0, 0.8, 1.4, 0.5, 0.1), 2.0);
  std::vector<double> xs;
  for (int i = 0; i < 16; ++i) xs.push_back(i / 8.0);
  const auto rep = check_conditions(pp, {1.0, 2.0, 10.0}, xs);
  CHECK(rep.sup_deviation[1] == 0.0);
  CHECK(rep.inf_c == doctest::Approx(0.8 / 3.6));
  CHECK(rep.ok());

  const auto sk = make_stable_kernel(Profile::smoothed_step(0.5, 0.9, 2.0), Profile::constant(1.0));
  const auto r2 = check_conditions(sk, {1000.0}, {-3.0, -1.0, 0.0, 1.0, 3.0});
  REQUIRE(std::isfinite(r2.lemma_bound[0]));
  CHECK(r2.sup_deviation[0] < r2.lemma_bound[0]);
  CHECK(r2.sup_tail_mass[0] > r2.sup_tail_mass[2]);
}
