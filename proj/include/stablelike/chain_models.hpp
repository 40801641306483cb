#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stablelike/quadrature.hpp"
#include "stablelike/random.hpp"
#include "stablelike/stable_dist.hpp"

namespace stablelike {

enum class ProfileKind { Constant, Step, SmoothedStep, PeriodicPlateau, PeriodicTable };

// Declared set {profile = value} = [start, start + length) modulo the period.
struct Plateau {
  double value = 0.0;
  double start = 0.0;
  double length = 0.0;
};

// State-dependent parameter x -> value. Immutable after construction.
class Profile {
 public:
  static Profile constant(double v);
  // left for x < 0, right for x >= 0.
  static Profile step(double left, double right);
  // left for x <= -k, right for x >= k, cubic smoothstep 3u^2 - 2u^3 in between.
  static Profile smoothed_step(double left, double right, double k);
  // tau-periodic: `base` on [0, plateau_fraction*tau); on the rest rises to `peak`
  // and back through C^1 smoothstep ramps, each covering ramp_fraction of the rest.
  static Profile periodic_plateau(double tau, double base, double peak, double plateau_fraction,
                                  double ramp_fraction);
  // tau-periodic piecewise-linear interpolation of `values` on a uniform grid.
  static Profile periodic_table(double tau, std::vector<double> values,
                                std::optional<Plateau> plateau);

  double operator()(double x) const;
  // Exact range bounds over all x.
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  ProfileKind kind() const { return kind_; }
  std::optional<double> period() const;
  std::optional<Plateau> plateau() const { return plateau_; }
  // Raw parameters in constructor order (serialization).
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& table() const { return table_; }

  // New profile with every value multiplied by c (scales only).
  Profile scaled(double c) const;

 private:
  ProfileKind kind_ = ProfileKind::Constant;
  std::vector<double> params_;
  std::vector<double> table_;
  std::optional<Plateau> plateau_;
  double lower_ = 0.0, upper_ = 0.0;
};

double smoothstep(double u);

// Symmetric probability mass function on Z: atom at 0, explicit body for
// 1 <= |j| <= J, analytic tail kappa |j|^{-alpha-1} for |j| > J.
class Pmf {
 public:
  Pmf(double atom0, std::vector<double> body, double tail_kappa, double tail_alpha,
      double mass_tol = 1e-12);

  double prob(long j) const;
  double atom0() const { return atom0_; }
  const std::vector<double>& body() const { return body_; }  // body()[j-1] = p(j)
  long J() const { return static_cast<long>(body_.size()); }
  double tail_kappa() const { return kappa_; }
  double tail_alpha() const { return alpha_; }
  // Mass of {|j| > J}, both sides, and its Euler–Maclaurin error bound.
  double tail_mass() const { return tail_mass_; }
  double tail_mass_error() const { return tail_mass_err_; }
  double mass() const { return mass_; }

  // Alias table over {0, 1..J, tail}, sign by a fair bit, tail by exact rejection.
  double sample(RandomStream& rng) const;

  // The simple +-1 walk.
  static Pmf two_point();

 private:
  double sample_tail(RandomStream& rng) const;

  double atom0_;
  std::vector<double> body_;
  double kappa_, alpha_;
  double tail_mass_ = 0.0, tail_mass_err_ = 0.0, mass_ = 0.0;
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_index_;
};

// p(j) = kappa |j|^{-alpha-1}, atom0 = 0, kappa = 1 / (2 zeta(alpha+1)).
Pmf make_discrete_pmf(double alpha, long J);

struct StableKernel {
  Profile alpha;
  Profile gamma;
  std::optional<StableSampler> fixed;  // set when both profiles are constant
};

struct StepChain {
  double alpha, beta, gamma, delta;
  StableSampler left, right;
};

struct SmoothedStep {
  double alpha, beta, gamma, delta, k;
  Profile alpha_profile, gamma_profile;
};

// Periodic Pareto jump law with index a: flat c on [-1,1], c|v|^{-a-1} beyond,
// c = a / (2(a+1)).
double pareto_scale(double a);
double pareto_density(double a, double v);
double pareto_cdf(double a, double v);

struct PeriodicPareto {
  Profile alpha;
  double tau;
};

struct DiscretePowerLaw {
  std::vector<double> alphas;  // per residue mod alphas.size()
  long J;
  std::vector<Pmf> pmfs;
};

using ChainSpec = std::variant<StableKernel, StepChain, SmoothedStep, PeriodicPareto, DiscretePowerLaw>;

ChainSpec make_stable_kernel(Profile alpha, Profile gamma);
ChainSpec make_step_chain(double alpha, double beta, double gamma, double delta);
ChainSpec make_smoothed_step(double alpha, double beta, double gamma, double delta, double k);
ChainSpec make_periodic_pareto(Profile alpha, double tau);
ChainSpec make_discrete_chain(std::vector<double> alphas, long J);

std::string kind_name(const ChainSpec& spec);
bool is_discrete(const ChainSpec& spec);

// Tail index and tail constant of the jump law from x.
double jump_alpha(const ChainSpec& spec, double x);
double jump_tail_constant(const ChainSpec& spec, double x);
// SaS parameters of the jump from x (stable-type specs only).
StableParams jump_stable_params(const ChainSpec& spec, double x);

double transition_sample(const ChainSpec& spec, double x, RandomStream& rng);
// f_x(y - x); continuous-state specs only.
double transition_density(const ChainSpec& spec, double x, double y, const QuadConfig& quad = {});
// P(J in [lo, hi]) for the jump from x (continuous-state specs).
double jump_probability(const ChainSpec& spec, double x, double lo, double hi,
                        const QuadConfig& quad = {});
// Pmf of the jump from integer state x (discrete spec only).
const Pmf& jump_pmf(const ChainSpec& spec, double x);

struct ConditionTolerances {
  double pc3 = 0.05;        // allowed tail-ratio deviation at the largest y
  double normalization = 1e-3;
};

struct ConditionReport {
  std::vector<double> y_grid;
  std::vector<double> sup_deviation;  // sup_x |f_x(y)|y|^{a(x)+1}/c(x) - 1|
  std::vector<double> lemma_bound;    // geometric bound where it applies, else NaN
  double inf_c = 0.0;
  std::vector<double> b_grid;
  std::vector<double> sup_tail_mass;  // sup_x int_b^inf f_x
  std::vector<double> normalization_error;  // at 16 sampled x
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ConditionReport check_conditions(const ChainSpec& spec, const std::vector<double>& y_grid,
                                 const std::vector<double>& x_grid,
                                 const ConditionTolerances& tol = {}, const QuadConfig& quad = {});

}  // namespace stablelike
