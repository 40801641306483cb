#include "stablelike/stable_dist.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "stablelike/errors.hpp"

namespace stablelike {

namespace {

constexpr double kPi = std::numbers::pi;

enum class Kernel { Cos, SinOverXi };

// Integral of exp(-xi^alpha) over [X, inf).
double envelope_tail(double alpha, double X) {
  return boost::math::tgamma(1.0 / alpha, std::pow(X, alpha)) / alpha;
}

// int_0^inf w(xi u) exp(-xi^alpha) d xi, with w = cos or sin(.)/xi, u > 0.
// Panels end at the zeros of w; the remainder after a zero X is bounded by
// integrating by parts once against the monotone envelope:
//   cos:     2 exp(-X^alpha) / u
//   sin/xi:  2 exp(-X^alpha) / (u X)
// Long alternating panel sequences are summed with Wynn's epsilon algorithm.
double oscillatory(Kernel kernel, double alpha, double u, double tol, const QuadConfig& quad) {
  auto integrand = [&](double xi) {
    const double env = std::exp(-std::pow(xi, alpha));
    if (kernel == Kernel::Cos) return std::cos(xi * u) * env;
    return xi > 0.0 ? std::sin(xi * u) / xi * env : u;
  };
  auto ibp_bound = [&](double X) {
    const double e = std::exp(-std::pow(X, alpha));
    return kernel == Kernel::Cos ? 2.0 * e / u : 2.0 * e / (u * X);
  };
  auto edge = [&](long k) {
    if (kernel == Kernel::Cos) return k == 0 ? 0.0 : (static_cast<double>(k) - 0.5) * kPi / u;
    return static_cast<double>(k) * kPi / u;
  };
  // Past xi_cut the envelope alone is negligible; avoids huge first panels when u is tiny.
  const double xi_cut = std::pow(-std::log(tol * 1e-3 * std::min(1.0, u)) + 1.0, 1.0 / alpha);

  QuadConfig panel_cfg = quad;
  panel_cfg.abs_tol = tol * 1e-2;
  panel_cfg.rel_tol = 0.0;

  std::vector<double> partial;
  double last_wynn = std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  double residual = 0.0;
  for (long k = 0; k < quad.max_panels; ++k) {
    const double a = edge(k);
    double b = edge(k + 1);
    const bool last = b >= xi_cut;
    if (last) b = xi_cut;
    // Split the first panel geometrically so the cusp of xi^alpha at 0 is cheap.
    if (a == 0.0 && b > 2.0) {
      double lo = 0.0;
      for (double hi = 1.0; lo < b; hi *= 2.0) {
        const double h = std::min(hi, b);
        sum += integrate(integrand, lo, h, panel_cfg).value;
        lo = h;
      }
    } else {
      sum += integrate(integrand, a, b, panel_cfg).value;
    }
    partial.push_back(sum);
    if (last) return sum;
    residual = ibp_bound(b);
    if (residual <= 0.5 * tol) return sum;
    const long n = k + 1;
    if (n >= 40 && n % 10 == 0) {
      const std::size_t take = 41;
      std::vector<double> tail(partial.end() - static_cast<long>(std::min(take, partial.size())),
                               partial.end());
      const QuadResult w = wynn_epsilon(tail);
      // Panel contributions alternate, so the limit lies between the last two
      // partial sums.
      const double lo = std::min(partial[n - 1], partial[n - 2]) - tol;
      const double hi = std::max(partial[n - 1], partial[n - 2]) + tol;
      // Two windows ten panels apart must also agree.
      const bool agree = std::abs(w.value - last_wynn) <= 0.5 * tol;
      last_wynn = w.value;
      if (agree && w.error <= 0.5 * tol && w.value >= lo && w.value <= hi) return w.value;
      residual = std::min(residual, w.error);
    }
  }
  throw NumericalError("oscillatory Fourier integral exceeded panel budget", residual);
}

double pdf_unit(double alpha, double u, const QuadConfig& quad, double tol) {
  if (u == 0.0) {
    // Non-oscillatory: geometric panels up to X, analytic remainder.
    double X = 1.0;
    while (envelope_tail(alpha, X) > 0.1 * tol * kPi) X *= 2.0;
    QuadConfig cfg = quad;
    cfg.abs_tol = 0.1 * tol * kPi;
    auto f = [alpha](double xi) { return std::exp(-std::pow(xi, alpha)); };
    double sum = 0.0;
    double lo = 0.0;
    for (double hi = 1.0; lo < X; hi *= 2.0) {
      sum += integrate(f, lo, hi, cfg).value;
      lo = hi;
    }
    return sum / kPi;
  }
  // Quadrature noise can dip below zero where the density underflows.
  return std::max(0.0, oscillatory(Kernel::Cos, alpha, u, tol * kPi, quad) / kPi);
}

void require_params(const StableParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) throw PreconditionError("alpha must lie in (0,2]");
  if (!(p.gamma > 0.0) || !std::isfinite(p.gamma)) throw PreconditionError("gamma must be > 0");
}

}  // namespace

StableParams StableParams::make(double alpha, double gamma) {
  StableParams p{alpha, gamma};
  require_params(p);
  return p;
}

double StableParams::scale() const { return std::pow(gamma, 1.0 / alpha); }

double cf(const StableParams& p, double xi) {
  return std::exp(-p.gamma * std::pow(std::abs(xi), p.alpha));
}

double tail_constant(const StableParams& p) {
  require_params(p);
  if (p.alpha >= 2.0) throw PreconditionError("alpha = 2: no power tail");
  return p.gamma * std::tgamma(p.alpha + 1.0) * std::sin(kPi * p.alpha / 2.0) / kPi;
}

double pdf(const StableParams& p, double y, const QuadConfig& quad) {
  require_params(p);
  const double s = p.scale();
  const double u = std::abs(y) / s;
  return pdf_unit(p.alpha, u, quad, quad.abs_tol * s) / s;
}

double cdf(const StableParams& p, double y, const QuadConfig& quad) {
  require_params(p);
  if (y == 0.0) return 0.5;
  const double s = p.scale();
  const double u = std::abs(y) / s;
  const double half = oscillatory(Kernel::SinOverXi, p.alpha, u, quad.abs_tol * kPi, quad) / kPi;
  const double upper = std::clamp(0.5 + half, 0.0, 1.0);
  return y > 0.0 ? upper : 1.0 - upper;
}

SeriesValue zolotarev_tail_series(const StableParams& p, double y, int n_terms) {
  require_params(p);
  const double ay = std::abs(y);
  if (!(p.alpha < 1.0)) throw PreconditionError("series not applicable: alpha must be < 1");
  if (!(ay >= 1.0)) throw PreconditionError("series not applicable: |y| must be >= 1");
  const double q = p.gamma / std::pow(ay, p.alpha);
  if (!(q < 1.0)) throw PreconditionError("series not applicable: gamma/|y|^alpha must be < 1");
  if (n_terms < 1) throw PreconditionError("n_terms must be >= 1");
  // Term n: (-1)^{n+1} Gamma(n alpha + 1)/n! sin(n pi alpha/2) gamma^n |y|^{-n alpha - 1} / pi.
  // For alpha < 1, Gamma(n alpha + 1) <= n!, so |term n| <= q^n / (pi |y|).
  double sum = 0.0;
  double qn = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    qn *= q;
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    const double logcoef = std::lgamma(n * p.alpha + 1.0) - std::lgamma(n + 1.0);
    sum += sign * std::exp(logcoef) * std::sin(n * kPi * p.alpha / 2.0) * qn / ay;
  }
  const double bound = qn * q / (1.0 - q) / (kPi * ay);
  return {sum / kPi, bound};
}

StableSampler::StableSampler(const StableParams& p)
    : alpha_(p.alpha),
      inv_alpha_(1.0 / p.alpha),
      expo_((1.0 - p.alpha) / p.alpha),
      scale_(p.scale()) {
  require_params(p);
}

double StableSampler::operator()(RandomStream& rng) const {
  // Two draws per variate for every alpha, so common random numbers line up across specs.
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  if (alpha_ == 1.0) return scale_ * std::tan(v);
  if (alpha_ == 2.0) return scale_ * 2.0 * std::sin(v) * std::sqrt(w);
  const double cv = std::cos(v);
  return scale_ * std::sin(alpha_ * v) * std::exp(-inv_alpha_ * std::log(cv) +
                                                  expo_ * std::log(std::cos((1.0 - alpha_) * v) / w));
}

double sample(const StableParams& p, RandomStream& rng) { return StableSampler(p)(rng); }

StableCdfTable::StableCdfTable(const StableParams& p, int nodes, const QuadConfig& quad)
    : params_(StableParams::make(p.alpha, p.gamma)), scale_(p.scale()) {
  if (nodes < 8) throw PreconditionError("StableCdfTable needs at least 8 nodes");
  theta_max_ = std::atan(1e4);
  const StableParams unit{p.alpha, 1.0};
  QuadConfig q = quad;
  q.abs_tol = std::min(quad.abs_tol, 1e-11);
  theta_.resize(nodes + 1);
  value_.resize(nodes + 1);
  slope_.resize(nodes + 1);
  for (int i = 0; i <= nodes; ++i) {
    const double th = theta_max_ * i / nodes;
    const double u = std::tan(th);
    const double c = std::cos(th);
    theta_[i] = th;
    value_[i] = cdf(unit, u, q);
    slope_[i] = pdf(unit, u, q) / (c * c);
  }
}

double StableCdfTable::operator()(double y) const {
  if (y < 0.0) return 1.0 - (*this)(-y);
  const double u = y / scale_;
  const double th = std::atan(u);
  if (th >= theta_max_) {
    if (params_.alpha >= 2.0) return 1.0;
    const double c = tail_constant(StableParams{params_.alpha, 1.0});
    return 1.0 - c * std::pow(u, -params_.alpha) / params_.alpha;
  }
  const double h = theta_[1] - theta_[0];
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(th / h), theta_.size() - 2);
  const double t = (th - theta_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double v = h00 * value_[i] + h10 * h * slope_[i] + h01 * value_[i + 1] +
                   h11 * h * slope_[i + 1];
  return std::clamp(v, 0.0, 1.0);
}

double StableCdfTable::quantile(double prob) const {
  if (!(prob > 0.0 && prob < 1.0)) throw PreconditionError("quantile needs prob in (0,1)");
  if (prob < 0.5) return -quantile(1.0 - prob);
  if (prob == 0.5) return 0.0;
  double lo = 0.0, hi = scale_;
  while ((*this)(hi) < prob) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < prob ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace stablelike
