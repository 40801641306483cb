#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stablelike/chain_models.hpp"

namespace stablelike {

struct PathDiscrete {
  double x0 = 0.0;
  std::vector<double> states;  // states[0] = x0
  std::uint64_t seed = 0;
};

struct SubordinationParams {
  double a = 1.0;
  double kappa = 1.0;
  static SubordinationParams make(double a, double kappa);
};

// Jump skeleton of a Poisson-subordinated chain. states[k] is the value after
// the k-th jump (states[0] = start), held on [jump_times[k-1], jump_times[k]).
struct PathCT {
  std::vector<double> jump_times;
  std::vector<double> states;
  SubordinationParams params;
  double horizon = 0.0;
  std::uint64_t seed = 0;

  double value_at(double t) const;
  std::size_t jumps_until(double t) const;
};

PathDiscrete run_chain(const ChainSpec& spec, double x0, std::size_t n, RandomStream& rng);

// Clock and chain use the child streams rng.split(1) and rng.split(0), so with
// a = 1 the skeleton equals run_chain on rng.split(0).
PathCT subordinate(const ChainSpec& spec, double x0, const SubordinationParams& p, double horizon,
                   const RandomStream& rng);

struct ScaledPath {
  PathCT path;
  double alpha0 = 0.0;
  bool plateau_warning = false;  // no declared plateau of positive length
};

// t -> n^{-1/alpha0} X_{N_{nt}} on [0, horizon].
ScaledPath scaled_periodic_path(const ChainSpec& spec, double x0, double n, double horizon,
                                const RandomStream& rng);

// StableKernel with jump law SaS(alpha(x), gamma(x)/m).
ChainSpec approx_chain(const Profile& alpha, const Profile& gamma, double m);

// Smooth compactly supported bump, peak 1 at center.
struct BumpFunction {
  double center = 0.0;
  double radius = 1.0;
  double operator()(double z) const;
};

// kappa * ( int f(x + a v) f_{x/a}(v) dv - f(x) ) by quadrature (summation for discrete specs).
double generator_apply(const ChainSpec& spec, const SubordinationParams& p, const BumpFunction& f,
                       double x, const QuadConfig& quad = {});

// Monte Carlo difference quotients (E f(Y_h) - f(x)) / h for each h. The
// Poisson count is integrated out exactly; E f(a X_n) for n <= n_max comes from
// `runs` chain paths whose first jump is stratified in its uniform input.
std::vector<double> semigroup_difference_quotients(const ChainSpec& spec,
                                                   const SubordinationParams& p,
                                                   const BumpFunction& f, double x,
                                                   const std::vector<double>& h_list,
                                                   std::size_t runs, const RandomStream& rng,
                                                   int n_max = 8);

// Exports: CSV with columns step_or_time,state; binary trace (see docs/formats.md).
void write_csv(const PathDiscrete& path, const std::string& file);
void write_csv(const PathCT& path, const std::string& file);
void write_trace(const PathDiscrete& path, const std::string& file);
void write_trace(const PathCT& path, const std::string& file);

struct TraceRecord {
  double t, x;
};
std::vector<TraceRecord> read_trace(const std::string& file, std::uint32_t* kind = nullptr);

}  // namespace stablelike
