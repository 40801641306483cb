#include "stablelike/special.hpp"

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "stablelike/errors.hpp"

namespace stablelike {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kTerms = 40;
}  // namespace

SeriesValue hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw PreconditionError("hurwitz_zeta needs s > 1, a > 0");
  constexpr int kDirect = 12;
  constexpr int kCorr = 10;
  double sum = 0.0;
  for (int k = 0; k < kDirect; ++k) sum += std::pow(a + k, -s);
  const double x = a + kDirect;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) x^{-s-2j+1}
  double rising = s;  // s (s+1) ... (s+2j-2)
  double fact = 2.0;  // (2j)!
  double xp = std::pow(x, -s - 1.0);
  double last = 0.0;
  for (int j = 1; j <= kCorr + 1; ++j) {
    const double term = boost::math::bernoulli_b2n<double>(j) / fact * rising * xp;
    if (j <= kCorr) {
      sum += term;
    } else {
      last = term;
    }
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2 * j + 1) * (2 * j + 2);
    xp /= x * x;
  }
  return {sum, 2.0 * std::abs(last)};
}

PowerCosineDeficit::PowerCosineDeficit(double s) : s_(s) {
  if (!(s > 1.0 && s < 3.0)) throw PreconditionError("PowerCosineDeficit needs 1 < s < 3");
  lead_ = (s == 2.0) ? kPi / 2.0 : -std::tgamma(1.0 - s) * std::sin(kPi * s / 2.0);
  if (s != 2.0) {
    double fact = 1.0;
    for (int m = 1; m <= kTerms; ++m) {
      fact *= (2.0 * m - 1.0) * (2.0 * m);
      const double z = boost::math::zeta(s - 2.0 * m);
      coef_.push_back(((m % 2 == 0) ? -1.0 : 1.0) * z / fact);
    }
  }
  remainder_scale_ = 2.0 * (kPi * kPi / 6.0) * std::pow(2.0 * kPi, s - 1.0);
}

SeriesValue PowerCosineDeficit::operator()(double xi) const {
  const double ax = std::abs(xi);
  if (ax > kPi * (1.0 + 1e-15)) throw PreconditionError("PowerCosineDeficit needs |xi| <= pi");
  if (s_ == 2.0) return {kPi * ax / 2.0 - ax * ax / 4.0, 0.0};
  const double x2 = ax * ax;
  // Horner in xi^2 from the highest retained order.
  double poly = 0.0;
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) poly = poly * x2 + *it;
  poly *= x2;
  const double r = x2 / (4.0 * kPi * kPi);
  const double bound = remainder_scale_ * std::pow(r, kTerms + 1) / (1.0 - r);
  return {lead_ * std::pow(ax, s_ - 1.0) + poly, bound};
}

}  // namespace stablelike
