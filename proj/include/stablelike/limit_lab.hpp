#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stablelike/chain_models.hpp"

namespace stablelike {

// Occupation histogram of the chain projected onto R / tau Z, bins on
// [origin, origin + tau).
struct TorusHistogram {
  double tau = 1.0;
  double origin = 0.0;
  std::size_t bins = 0;
  std::vector<double> weights;
  std::vector<double> se;  // batch-means standard error per bin
  std::size_t sample_size = 0;

  double bin_width() const { return tau / static_cast<double>(bins); }
  double midpoint(std::size_t b) const;
};

struct InvariantMeasureConfig {
  std::size_t n_steps = 1000000;
  std::size_t bins = 200;
  double burn_in = 0.1;
  std::size_t batches = 100;  // batch means for the per-bin s.e.
  double x0 = 0.0;
  double origin = 0.0;
  std::uint64_t seed = 1;
};

TorusHistogram invariant_measure(const ChainSpec& spec, const InvariantMeasureConfig& cfg);

// TV(pi, pi P) with pi P from one-step transitions out of each bin midpoint.
// Windings up to |k| <= windings are summed; the remaining mass is spread
// uniformly.
double stationarity_defect(const ChainSpec& spec, const TorusHistogram& hist, int windings = 200);

struct ThetaEstimate {
  double value = 0.0;
  double alpha0 = 0.0;
  double plateau_tol = 0.0;
  bool plateau_declared = false;
  std::string warning;
};

// Theta = sum over bins with alpha(mid) <= alpha0 + tol of c(mid) * weight;
// alpha0 comes from the declared plateau of the profile.
ThetaEstimate theta(const TorusHistogram& hist, const Profile& alpha,
                    const std::function<double(double)>& c, double plateau_tol = 1e-9);
ThetaEstimate theta(const ChainSpec& periodic_pareto, const TorusHistogram& hist,
                    double plateau_tol = 1e-9);

// Odd, bounded, C^1: identity on |y| <= h0, a quartic blend on [h0, h0/0.9]
// with zero end slope, constant 0.95 h0/0.9 beyond.
class TruncationFn {
 public:
  explicit TruncationFn(double h0 = 0.9);
  double operator()(double y) const;
  double h0() const { return h0_; }
  double h1() const { return h1_; }
  double bound() const { return 0.95 * h1_; }

 private:
  double h0_, h1_;
};

// Test functions vanishing near 0: indicator 1{|y| > b} or ramp that is 0 on
// |y| <= delta, linear up to 1 at 2 delta, 1 beyond.
struct TestFn {
  enum class Kind { Indicator, Ramp } kind = Kind::Indicator;
  double level = 1.0;  // b or delta
  double operator()(double y) const;
  static TestFn indicator(double b);
  static TestFn ramp(double delta);
};

struct CharacteristicsEstimate {
  double B = 0.0;
  double Ctilde = 0.0;
  double nu_g = 0.0;
  double nu_g_se = 0.0;
  double n = 1.0;
  double t = 1.0;
};

CharacteristicsEstimate limiting_characteristics(const ThetaEstimate& theta, const TruncationFn& h,
                                                 const TestFn& g, double t);

// Inner y-integrals of the scaled process at chain state with index a and
// spatial scale s = n^{-1/alpha0}, per unit time (rate n included).
struct InnerIntegrals {
  double B = 0.0;
  double Ctilde = 0.0;
  double nu_g = 0.0;
};
InnerIntegrals pareto_inner_integrals(double alpha, double n, double alpha0,
                                      const TruncationFn& h, const TestFn& g);

CharacteristicsEstimate empirical_characteristics(const ChainSpec& spec, double n, double t,
                                                  const TruncationFn& h, const TestFn& g,
                                                  std::size_t paths, std::uint64_t seed,
                                                  int threads = 1);

// Scale of the alpha0-stable limit at time t, matching the Levy density
// Theta |y|^{-alpha0-1}.
double gamma_eff(double theta, double alpha0, double t);

struct MarginalKs {
  double ks = 0.0;
  double gamma_eff = 0.0;
  double alpha0 = 0.0;
};

MarginalKs marginal_ks(const ChainSpec& spec, double n, double t, std::size_t paths, double theta,
                       std::uint64_t seed, int threads = 1);

}  // namespace stablelike
