#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablelike/chain_models.hpp"

namespace stablelike {

enum class Verdict { RecurrentLeaning, TransientLeaning, Inconclusive };
std::string verdict_name(Verdict v);

// Finite-horizon surrogate configuration. The deciding statistic is the
// overshoot contraction: minus the mean of log(|L_{k+1}| / |L_k|) over
// successive landing points L_k of sign changes of the path, restricted to
// |L_k| >= radius. Positive means the path is pulled back in scale.
struct ClassifierConfig {
  std::size_t horizon = 100000;
  std::size_t n_paths = 200;
  double radius = 10.0;
  double burn_in = 0.5;
  double theta_rec = 0.5;    // contraction >= theta_rec -> recurrent side
  double theta_tr = -0.5;    // contraction <= theta_tr -> transient side
  double z_min = 3.0;        // contraction must clear 0 by z_min standard errors
  std::size_t min_crossings = 50;
  double escape_cap = 10.0;  // transient side also needs final escape >= escape_cap * radius
  std::size_t escape_points = 10;  // grid intervals; the curve has escape_points + 1 entries
  double landing_floor = 0.01;  // |L| floored at landing_floor * radius inside the log
  double x0 = 0.0;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

struct ClassifierReport {
  double occupation = 0.0;     // mean fraction of post-burn-in steps in [-r, r]
  double late_return = 0.0;    // fraction of paths visiting [-r, r] after burn-in
  std::vector<std::size_t> escape_steps;
  std::vector<double> escape_curve;  // median over paths of min_{n >= m} |X_n|
  double contraction = 0.0;
  double contraction_se = 0.0;
  std::size_t crossings = 0;
  Verdict verdict = Verdict::Inconclusive;
  double margin = 0.0;  // signed distance of the deciding statistic past its threshold
  std::string reason;
  ClassifierConfig config;
};

ClassifierReport classify(const ChainSpec& spec, const ClassifierConfig& cfg);

struct SeparationReport {
  ClassifierReport a, b;
  double late_return_ratio = 0.0;  // a / b; +inf when b is 0 and a > 0
};

// Both specs are run with the same per-path streams (common random numbers).
SeparationReport separation_experiment(const ChainSpec& a, const ChainSpec& b,
                                       const ClassifierConfig& cfg);

struct ScaleInvarianceReport {
  double c = 1.0;
  ClassifierReport base, scaled;
  bool consistent = false;  // equal verdicts, or at least one Inconclusive
};

ScaleInvarianceReport scale_invariance_check(const ChainSpec& spec, double c,
                                             const ClassifierConfig& cfg);
// Same, reusing an already computed report for the unscaled spec.
ScaleInvarianceReport scale_invariance_check(const ChainSpec& spec, double c, const ClassifierConfig& cfg,
                                             const ClassifierReport& base);

}  // namespace stablelike
