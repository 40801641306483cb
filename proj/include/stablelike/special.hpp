#pragma once

#include <vector>

#include "stablelike/stable_dist.hpp"

namespace stablelike {

// Hurwitz zeta sum_{k>=0} (a+k)^{-s}, s > 1, a > 0, by Euler–Maclaurin with
// an explicit bound on the first omitted correction.
SeriesValue hurwitz_zeta(double s, double a);

// D_s(xi) = sum_{j>=1} j^{-s} (1 - cos(j xi)) for 1 < s < 3 and |xi| <= pi,
// from the expansion of Re Li_s(e^{i xi}) around xi = 0:
//   D_s(xi) = -Gamma(1-s) sin(pi s/2) |xi|^{s-1} - sum_{m>=1} (-1)^m zeta(s-2m) xi^{2m}/(2m)!
// (s = 2 uses the closed form pi|xi|/2 - xi^2/4).
class PowerCosineDeficit {
 public:
  explicit PowerCosineDeficit(double s);
  SeriesValue operator()(double xi) const;
  double s() const { return s_; }

 private:
  double s_;
  double lead_;                // -Gamma(1-s) sin(pi s/2)
  std::vector<double> coef_;   // -(-1)^m zeta(s-2m)/(2m)!, m = 1..M
  double remainder_scale_;     // 2 zeta(2) (2 pi)^{s-1}
};

}  // namespace stablelike
