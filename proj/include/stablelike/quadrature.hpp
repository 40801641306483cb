#pragma once

#include <functional>
#include <vector>

namespace stablelike {

struct QuadConfig {
  double abs_tol = 1e-12;
  double rel_tol = 0.0;
  int max_subdivisions = 400;  // per adaptive integral
  int max_panels = 200000;     // per oscillatory integral
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  int subdivisions = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive G7/K15 on [a,b]; throws NumericalError carrying the residual
// estimate if the tolerance is not met within cfg.max_subdivisions.
QuadResult integrate(const Integrand& f, double a, double b, const QuadConfig& cfg);

// Same, but returns the best estimate instead of throwing.
QuadResult integrate_nothrow(const Integrand& f, double a, double b, const QuadConfig& cfg);

// Single K15 panel with G7 error estimate.
QuadResult kronrod15(const Integrand& f, double a, double b);

// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
// extrapolated limit and an error estimate from the last two diagonal entries.
QuadResult wynn_epsilon(const std::vector<double>& partial_sums);

}  // namespace stablelike
