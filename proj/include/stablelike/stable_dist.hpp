#pragma once

#include <vector>

#include "stablelike/quadrature.hpp"
#include "stablelike/random.hpp"

namespace stablelike {

// Symmetric alpha-stable law with characteristic function exp(-gamma |xi|^alpha).
struct StableParams {
  double alpha = 2.0;
  double gamma = 1.0;

  // Validating constructor: 0 < alpha <= 2, gamma > 0.
  static StableParams make(double alpha, double gamma);
  // Spatial scale gamma^{1/alpha}.
  double scale() const;
};

double cf(const StableParams& p, double xi);

// gamma * Gamma(alpha+1) * sin(pi alpha / 2) / pi; rejects alpha = 2.
double tail_constant(const StableParams& p);

double pdf(const StableParams& p, double y, const QuadConfig& quad = {});
double cdf(const StableParams& p, double y, const QuadConfig& quad = {});

struct SeriesValue {
  double value = 0.0;
  double error_bound = 0.0;
};

// Convergent large-|y| expansion of the density for alpha < 1, truncated after
// n_terms, with a geometric bound on the omitted terms.
SeriesValue zolotarev_tail_series(const StableParams& p, double y, int n_terms);

// Exact variate by the trigonometric (Chambers–Mallows–Stuck) method.
double sample(const StableParams& p, RandomStream& rng);

// Same method with the per-law constants precomputed, for hot loops.
class StableSampler {
 public:
  explicit StableSampler(const StableParams& p);
  double operator()(RandomStream& rng) const;

 private:
  double alpha_, inv_alpha_, expo_, scale_;
};

// Tabulated CDF for repeated evaluation (KS tests, quantiles). Cubic Hermite
// interpolation in an arctan-compressed coordinate, with the power tail beyond
// the last node.
class StableCdfTable {
 public:
  explicit StableCdfTable(const StableParams& p, int nodes = 600, const QuadConfig& quad = {});
  double operator()(double y) const;
  double quantile(double prob) const;
  const StableParams& params() const { return params_; }

 private:
  StableParams params_;
  double scale_;
  double theta_max_;
  std::vector<double> theta_, value_, slope_;  // slope is dF/dtheta
};

}  // namespace stablelike
