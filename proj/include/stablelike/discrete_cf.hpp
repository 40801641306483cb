#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablelike/chain_models.hpp"
#include "stablelike/quadrature.hpp"
#include "stablelike/recurrence_lab.hpp"

namespace stablelike {

// Parity-periodic power-law chain on the integers; residue i uses alphas[i].
using DiscreteChainSpec = DiscretePowerLaw;

DiscreteChainSpec make_discrete_spec(std::vector<double> alphas, long J);

// The chain watched only on one parity class, in sublattice coordinates
// (state 2i + parity maps to i). The table part of jump_pmf is a lower bound
// entry by entry; error_bound bounds the total mass that may be missing from
// or misallocated outside the table.
struct EmbeddedWalk {
  int parity = 0;
  Pmf jump_pmf = Pmf::two_point();
  long J = 0;             // table half-width in sublattice units
  long J_work = 0;        // convolution half-width in sublattice units
  int k_max = 0;          // excursion steps on the other class
  double C = 0.0;         // probability that a jump from the other class stays on it
  double C_kmax = 0.0;    // C^k_max
  double remaining = 0.0;  // mass still on the other class after k_max steps
  double escaped = 0.0;    // mass that left the working window during excursions
  double return_bound = 0.0;  // bound on the chance escaped mass lands back in the table
  double deficit = 0.0;       // 1 - represented mass
  double error_bound = 0.0;   // remaining + escaped * return_bound
  double tail_mass = 0.0;     // mass assigned beyond the table
};

EmbeddedWalk embedded_jump_dist(const DiscreteChainSpec& spec, int parity, long J, double tol);

// 1 - phi(xi) = sum_j p(j) (1 - cos j xi), with the analytic tail summed in
// closed form. A mass deficit counts as an atom at 0.
SeriesValue one_minus_cf(const Pmf& pmf, double xi);
double cf_of_pmf(const Pmf& pmf, double xi);

enum class DivergenceModel { Bounded, Logarithmic, Power };
std::string model_name(DivergenceModel m);

struct ChungFuchsProfile {
  std::vector<double> eps;
  std::vector<double> integral;  // I(eps) = int_eps^pi dxi / (1 - phi(xi))
  std::vector<double> integral_error;
  double local_exponent = 0.0;   // slope of log(1 - phi) on the smallest decade
  double exponent_residual = 0.0;
  double fit_lo = 0.0, fit_hi = 0.0;
  // rms residual of I(eps) = c0 + c1 g(eps) for each model, NaN if not admissible
  double residual_bounded = 0.0, residual_log = 0.0, residual_power = 0.0;
  DivergenceModel model = DivergenceModel::Bounded;
  bool diverging = false;
};

ChungFuchsProfile chung_fuchs_profile(const Pmf& pmf, const std::vector<double>& eps_grid,
                                      const QuadConfig& quad = {});

std::vector<double> default_eps_grid();

struct DiscreteClassification {
  Verdict verdict = Verdict::Inconclusive;
  std::string route;  // "random_walk", "embedded", "heuristic"
  double margin = 0.0;
  std::string reason;
  ChungFuchsProfile profile;
  bool has_embedded = false;
  EmbeddedWalk embedded;
};

DiscreteClassification classify_discrete(const DiscreteChainSpec& spec, long J, double tol,
                                         const std::vector<double>& eps_grid,
                                         double exponent_margin = 0.1);

struct AttractionReport {
  std::vector<long> n_list;
  std::vector<double> ks;        // against SaS(alpha, limit_gamma)
  double limit_gamma = 0.0;      // matches the pmf tail constant
  double fitted_gamma = 0.0;     // quartile match at the largest n; diagnostic only
  bool non_increasing = false;  // within 1 / sqrt(n_samples) noise allowance
};

AttractionReport attraction_check(const Pmf& pmf, double alpha, const std::vector<long>& n_list,
                                  std::size_t n_samples, std::uint64_t seed, int threads = 1);

}  // namespace stablelike
