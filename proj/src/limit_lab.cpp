#include "stablelike/limit_lab.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "stablelike/errors.hpp"
#include "stablelike/parallel.hpp"
#include "stablelike/simulate.hpp"
#include "stablelike/stats.hpp"

namespace stablelike {

namespace {

const PeriodicPareto& need_pareto(const ChainSpec& spec) {
  const auto* p = std::get_if<PeriodicPareto>(&spec);
  if (!p) throw PreconditionError("periodic Pareto spec required");
  return *p;
}

double wrap(double x, double origin, double tau) {
  double u = std::fmod(x - origin, tau);
  if (u < 0.0) u += tau;
  if (u >= tau) u = 0.0;
  return u;
}

template <class F>
double gl(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

// 2 int_A^B y^k c y^{-a-1} dy for A >= 1.
double power_piece(double a, double k, double A, double B) {
  if (!(B > A)) return 0.0;
  const double c = pareto_scale(a), e = k - a;
  if (std::abs(e) < 1e-12) return 2.0 * c * std::log(B / A);
  return 2.0 * c * (std::pow(B, e) - std::pow(A, e)) / e;
}

// 2 int_0^inf w(s y) f(y) dy for the Pareto family with index a, where w is
// polynomial of degree `deg` (w(u) = coef * u^deg) on u <= u0, arbitrary on
// [u0, u1] and equal to w_inf beyond u1.
template <class W>
double pareto_expect(double a, double s, double coef, int deg, double u0, double u1, const W& w,
                     double w_inf) {
  const double c = pareto_scale(a);
  const double y0 = u0 / s, y1 = u1 / s;
  double total = 0.0;
  // polynomial part on [0, y0]
  const double k = static_cast<double>(deg);
  const double flat_hi = std::min(y0, 1.0);
  if (coef != 0.0) {
    total += 2.0 * c * coef * std::pow(s, k) * std::pow(flat_hi, k + 1.0) / (k + 1.0);
    if (y0 > 1.0) total += coef * std::pow(s, k) * power_piece(a, k, 1.0, y0);
  }
  // blend on [y0, y1], split at the density kink
  auto dens = [&](double y) { return 2.0 * pareto_density(a, y); };
  auto blend = [&](double y) { return w(s * y) * dens(y); };
  if (y1 > y0) {
    if (y0 < 1.0 && y1 > 1.0) {
      total += gl(blend, y0, 1.0) + gl(blend, 1.0, y1);
    } else {
      total += gl(blend, y0, y1);
    }
  }
  // constant beyond y1
  total += w_inf * 2.0 * (1.0 - pareto_cdf(a, y1));
  return total;
}

}  // namespace

double TorusHistogram::midpoint(std::size_t b) const {
  return origin + (static_cast<double>(b) + 0.5) * bin_width();
}

TorusHistogram invariant_measure(const ChainSpec& spec, const InvariantMeasureConfig& cfg) {
  const PeriodicPareto& p = need_pareto(spec);
  if (cfg.bins < 16) throw PreconditionError("invariant_measure needs at least 16 bins");
  if (!(cfg.burn_in >= 0.0 && cfg.burn_in < 1.0)) throw PreconditionError("burn_in must lie in [0,1)");
  if (cfg.batches < 2) throw PreconditionError("at least 2 batches required");
  const auto burn = static_cast<std::size_t>(cfg.burn_in * static_cast<double>(cfg.n_steps));
  const std::size_t kept = cfg.n_steps - burn;
  if (kept < cfg.batches) throw PreconditionError("n_steps too small for the batch count");

  TorusHistogram h;
  h.tau = p.tau;
  h.origin = cfg.origin;
  h.bins = cfg.bins;
  h.sample_size = kept;
  std::vector<std::vector<double>> batch(cfg.batches, std::vector<double>(cfg.bins, 0.0));
  const std::size_t per = kept / cfg.batches;

  RandomStream rng(cfg.seed);
  double x = cfg.x0;
  const double bw = p.tau / static_cast<double>(cfg.bins);
  for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
    x = transition_sample(spec, x, rng);
    // Recentre by whole periods so the state stays small; the kernel is
    // tau-periodic, so the projected chain is unchanged.
    const double shift = p.tau * std::floor(x / p.tau);
    x -= shift;
    if (k <= burn) continue;
    const std::size_t idx = k - burn - 1;
    const std::size_t bi = std::min(idx / per, cfg.batches - 1);
    auto b = static_cast<std::size_t>(wrap(x, cfg.origin, p.tau) / bw);
    batch[bi][std::min(b, cfg.bins - 1)] += 1.0;
  }

  h.weights.assign(cfg.bins, 0.0);
  h.se.assign(cfg.bins, 0.0);
  std::vector<double> frac(cfg.batches);
  for (std::size_t b = 0; b < cfg.bins; ++b) {
    for (std::size_t i = 0; i < cfg.batches; ++i) {
      double cnt = 0.0;
      for (double v : batch[i]) cnt += v;
      frac[i] = batch[i][b] / cnt;
      h.weights[b] += batch[i][b];
    }
    h.se[b] = mean_se(frac).se;
  }
  double total = 0.0;
  for (double w : h.weights) total += w;
  for (double& w : h.weights) w /= total;
  return h;
}

double stationarity_defect(const ChainSpec& spec, const TorusHistogram& hist, int windings) {
  const PeriodicPareto& p = need_pareto(spec);
  if (std::abs(hist.tau - p.tau) > 1e-12 * p.tau) throw PreconditionError("histogram period differs from the spec");
  if (windings < 1) throw PreconditionError("windings must be >= 1");
  const std::size_t nb = hist.bins;
  const double bw = hist.bin_width();
  std::vector<double> evolved(nb, 0.0);
  std::vector<double> cdfv(nb + 1);
  double leftover = 0.0;
  for (std::size_t a = 0; a < nb; ++a) {
    const double w = hist.weights[a];
    if (w == 0.0) continue;
    const double x = hist.midpoint(a);
    const double al = p.alpha(x);
    double covered = 0.0;
    for (int k = -windings; k <= windings; ++k) {
      const double base = hist.origin + k * p.tau - x;
      for (std::size_t b = 0; b <= nb; ++b) cdfv[b] = pareto_cdf(al, base + static_cast<double>(b) * bw);
      for (std::size_t b = 0; b < nb; ++b) evolved[b] += w * (cdfv[b + 1] - cdfv[b]);
      covered += cdfv[nb] - cdfv[0];
    }
    leftover += w * std::max(0.0, 1.0 - covered);
  }
  for (double& v : evolved) v += leftover / static_cast<double>(nb);
  return total_variation(hist.weights, evolved);
}

ThetaEstimate theta(const TorusHistogram& hist, const Profile& alpha,
                    const std::function<double(double)>& c, double plateau_tol) {
  const bool constant = alpha.kind() == ProfileKind::Constant;
  const auto period = alpha.period();
  if (!constant && (!period || std::abs(*period - hist.tau) > 1e-12 * hist.tau))
    throw PreconditionError("alpha profile must be periodic with the histogram period");
  if (!(plateau_tol >= 0.0)) throw PreconditionError("plateau_tol must be >= 0");
  ThetaEstimate est;
  est.plateau_tol = plateau_tol;
  const auto plat = alpha.plateau();
  est.plateau_declared = constant || (plat && plat->length > 0.0);
  est.alpha0 = plat ? plat->value : alpha.lower();
  if (!est.plateau_declared) est.warning = "no plateau of positive length declared; alpha0 is the profile minimum";
  for (std::size_t b = 0; b < hist.bins; ++b) {
    const double x = hist.midpoint(b);
    if (alpha(x) <= est.alpha0 + plateau_tol) est.value += c(x) * hist.weights[b];
  }
  if (est.value == 0.0 && est.warning.empty())
    est.warning = "plateau carries no histogram mass";
  return est;
}

ThetaEstimate theta(const ChainSpec& spec, const TorusHistogram& hist, double plateau_tol) {
  const PeriodicPareto& p = need_pareto(spec);
  return theta(hist, p.alpha, [&](double x) { return pareto_scale(p.alpha(x)); }, plateau_tol);
}

TruncationFn::TruncationFn(double h0) : h0_(h0), h1_(h0 / 0.9) {
  if (!(h0 > 0.0)) throw PreconditionError("truncation cutoff h0 must be > 0");
}

double TruncationFn::operator()(double y) const {
  const double ay = std::abs(y);
  double v;
  if (ay <= h0_) {
    v = ay;
  } else if (ay >= h1_) {
    v = 0.95 * h1_;
  } else {
    const double u = (ay - h0_) / (h1_ - h0_);
    v = h1_ * (0.9 + 0.1 * u - 0.1 * u * u * u + 0.05 * u * u * u * u);
  }
  return y < 0.0 ? -v : v;
}

double TestFn::operator()(double y) const {
  const double ay = std::abs(y);
  if (kind == Kind::Indicator) return ay > level ? 1.0 : 0.0;
  if (ay <= level) return 0.0;
  if (ay >= 2.0 * level) return 1.0;
  return (ay - level) / level;
}

TestFn TestFn::indicator(double b) {
  if (!(b > 0.0)) throw PreconditionError("test function must vanish near 0 (b > 0)");
  return {Kind::Indicator, b};
}

TestFn TestFn::ramp(double delta) {
  if (!(delta > 0.0)) throw PreconditionError("test function must vanish near 0 (delta > 0)");
  return {Kind::Ramp, delta};
}

CharacteristicsEstimate limiting_characteristics(const ThetaEstimate& th, const TruncationFn& h,
                                                 const TestFn& g, double t) {
  if (!(t >= 0.0)) throw PreconditionError("t must be >= 0");
  if (!(g.level > 0.0)) throw PreconditionError("test function must vanish near 0");
  const double a0 = th.alpha0;
  if (!(a0 > 0.0 && a0 < 2.0)) throw PreconditionError("alpha0 must lie in (0,2)");
  CharacteristicsEstimate out;
  out.t = t;
  out.n = std::numeric_limits<double>::infinity();
  // B: the integrand h(y) - y 1{|y|<=1} is odd against an even measure.
  out.B = 0.0;
  auto levy = [&](double y) { return std::pow(y, -a0 - 1.0); };
  const double h0 = h.h0(), h1 = h.h1();
  double c2 = std::pow(h0, 2.0 - a0) / (2.0 - a0);
  c2 += gl([&](double y) { const double v = h(y); return v * v * levy(y); }, h0, h1);
  c2 += h.bound() * h.bound() * std::pow(h1, -a0) / a0;
  out.Ctilde = th.value * t * 2.0 * c2;
  double ng;
  if (g.kind == TestFn::Kind::Indicator) {
    ng = std::pow(g.level, -a0) / a0;
  } else {
    ng = gl([&](double y) { return g(y) * levy(y); }, g.level, 2.0 * g.level) +
         std::pow(2.0 * g.level, -a0) / a0;
  }
  out.nu_g = th.value * t * 2.0 * ng;
  return out;
}

InnerIntegrals pareto_inner_integrals(double alpha, double n, double alpha0, const TruncationFn& h,
                                      const TestFn& g) {
  const double s = std::pow(n, -1.0 / alpha0);
  InnerIntegrals in;
  in.B = 0.0;  // odd h against a symmetric jump law
  in.Ctilde = n * pareto_expect(
                      alpha, s, 1.0, 2, h.h0(), h.h1(),
                      [&](double u) { const double v = h(u); return v * v; }, h.bound() * h.bound());
  if (g.kind == TestFn::Kind::Indicator) {
    in.nu_g = n * 2.0 * (1.0 - pareto_cdf(alpha, g.level / s));
  } else {
    in.nu_g = n * pareto_expect(alpha, s, 0.0, 0, g.level, 2.0 * g.level, g, 1.0);
  }
  return in;
}

CharacteristicsEstimate empirical_characteristics(const ChainSpec& spec, double n, double t,
                                                  const TruncationFn& h, const TestFn& g,
                                                  std::size_t paths, std::uint64_t seed,
                                                  int threads) {
  const PeriodicPareto& p = need_pareto(spec);
  if (!(n >= 1.0)) throw PreconditionError("scaling index n must be >= 1");
  if (!(t > 0.0)) throw PreconditionError("t must be > 0");
  if (paths < 2) throw PreconditionError("at least 2 paths required");
  const double alpha0 = p.alpha.lower();
  const double s = std::pow(n, -1.0 / alpha0);

  std::vector<double> cvals(paths), gvals(paths);
  const RandomStream master(seed);
  parallel_for(paths, threads, [&](std::size_t i) {
    const ScaledPath sp = scaled_periodic_path(spec, 0.0, n, t, master.split(i));
    const PathCT& path = sp.path;
    double c_int = 0.0, g_int = 0.0;
    for (std::size_t k = 0; k < path.states.size(); ++k) {
      const double start = k == 0 ? 0.0 : path.jump_times[k - 1];
      const double end = k < path.jump_times.size() ? std::min(path.jump_times[k], t) : t;
      if (end <= start) continue;
      const double x = path.states[k] / s;
      const InnerIntegrals in = pareto_inner_integrals(p.alpha(x), n, alpha0, h, g);
      c_int += in.Ctilde * (end - start);
      g_int += in.nu_g * (end - start);
    }
    cvals[i] = c_int;
    gvals[i] = g_int;
  });
  CharacteristicsEstimate out;
  out.n = n;
  out.t = t;
  out.B = 0.0;
  out.Ctilde = mean_se(cvals).mean;
  const MeanSe ms = mean_se(gvals);
  out.nu_g = ms.mean;
  out.nu_g_se = ms.se;
  return out;
}

double gamma_eff(double theta_value, double alpha0, double t) {
  if (!(alpha0 > 0.0 && alpha0 < 2.0)) throw PreconditionError("alpha0 must lie in (0,2)");
  return t * theta_value * std::numbers::pi /
         (boost::math::tgamma(alpha0 + 1.0) * std::sin(std::numbers::pi * alpha0 / 2.0));
}

MarginalKs marginal_ks(const ChainSpec& spec, double n, double t, std::size_t paths,
                       double theta_value, std::uint64_t seed, int threads) {
  const PeriodicPareto& p = need_pareto(spec);
  if (!(t > 0.0)) throw PreconditionError("t must be > 0");
  if (!(theta_value > 0.0)) throw PreconditionError("Theta must be > 0");
  if (paths < 2) throw PreconditionError("at least 2 paths required");
  MarginalKs out;
  out.alpha0 = p.alpha.lower();
  out.gamma_eff = gamma_eff(theta_value, out.alpha0, t);
  std::vector<double> z(paths);
  const RandomStream master(seed);
  parallel_for(paths, threads, [&](std::size_t i) {
    const ScaledPath sp = scaled_periodic_path(spec, 0.0, n, t, master.split(i));
    z[i] = sp.path.value_at(t);
  });

  const StableCdfTable table(StableParams::make(out.alpha0, out.gamma_eff));
  out.ks = ks_statistic(std::move(z), [&](double y) { return table(y); });
  return out;
}

}  // namespace stablelike
