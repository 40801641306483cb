#include <doctest.h>

#include <cmath>

#include "stablelike/errors.hpp"
#include "stablelike/recurrence_lab.hpp"

using namespace stablelike;

namespace {
ClassifierConfig small_cfg() {
  ClassifierConfig c;
  c.horizon = 20000;
  c.n_paths = 60;
  c.seed = 3;
  return c;
}
}  // namespace

TEST_CASE("classifier config validation") {
  ClassifierConfig c;
  c.burn_in = 1.0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.theta_tr = 1.0;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
  c = {};
  c.n_paths = 1;
  CHECK_THROWS_AS(c.validate(), PreconditionError);
}

TEST_CASE("tiny horizon is inconclusive") {
  ClassifierConfig c;
  c.horizon = 10;
  const auto rep = classify(make_stable_kernel(Profile::constant(1.5), Profile::constant(1.0)), c);
  CHECK(rep.verdict == Verdict::Inconclusive);
  CHECK(rep.crossings < c.min_crossings);
}

TEST_CASE("well separated SaS walks on a short horizon") {
  const auto cfg = small_cfg();
  const auto rec = classify(make_stable_kernel(Profile::constant(1.5), Profile::constant(1.0)), cfg);
  const auto tr = classify(make_stable_kernel(Profile::constant(0.7), Profile::constant(1.0)), cfg);
  CHECK(rec.verdict == Verdict::RecurrentLeaning);
  CHECK(tr.verdict == Verdict::TransientLeaning);
  CHECK(rec.margin > 0.0);
  CHECK(tr.margin > 0.0);
  CHECK(rec.late_return > tr.late_return);
  CHECK(rec.escape_curve.size() == cfg.escape_points + 1);
  // Escape curve is a suffix minimum profile, so it cannot decrease.
  for (std::size_t i = 1; i < tr.escape_curve.size(); ++i) CHECK(tr.escape_curve[i] >= tr.escape_curve[i - 1]);
}

TEST_CASE("classification is reproducible and thread-count independent") {
  auto cfg = small_cfg();
  cfg.horizon = 5000;
  const auto spec = make_step_chain(1.6, 0.6, 1.0, 1.0);
  const auto a = classify(spec, cfg);
  cfg.threads = 3;
  const auto b = classify(spec, cfg);
  CHECK(a.contraction == b.contraction);
  CHECK(a.occupation == b.occupation);
  CHECK(a.escape_curve == b.escape_curve);
}

TEST_CASE("separation ratio conventions") {
  auto cfg = small_cfg();
  cfg.horizon = 5000;
  cfg.n_paths = 20;
  const auto s = separation_experiment(make_stable_kernel(Profile::constant(1.5), Profile::constant(1.0)),
                                       make_stable_kernel(Profile::constant(0.5), Profile::constant(1.0)), cfg);
  if (s.b.late_return == 0.0) CHECK(std::isinf(s.late_return_ratio));
  else CHECK(s.late_return_ratio == doctest::Approx(s.a.late_return / s.b.late_return));
}

TEST_CASE("scale invariance with c = 1 copies the base run") {
  auto cfg = small_cfg();
  cfg.horizon = 3000;
  const auto spec = make_stable_kernel(Profile::constant(1.5), Profile::constant(1.0));
  const auto r = scale_invariance_check(spec, 1.0, cfg);
  CHECK(r.consistent);
  CHECK(r.scaled.contraction == r.base.contraction);
  CHECK_THROWS_AS(scale_invariance_check(make_step_chain(1.0, 1.0, 1.0, 1.0), 2.0, cfg), PreconditionError);
}
