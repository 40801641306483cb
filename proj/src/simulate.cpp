#include "stablelike/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "stablelike/errors.hpp"

namespace stablelike {

SubordinationParams SubordinationParams::make(double a, double kappa) {
  if (!(a != 0.0) || !std::isfinite(a)) throw PreconditionError("subordination a must be nonzero");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw PreconditionError("kappa must be > 0");
  return {a, kappa};
}

std::size_t PathCT::jumps_until(double t) const {
  return static_cast<std::size_t>(std::upper_bound(jump_times.begin(), jump_times.end(), t) -
                                  jump_times.begin());
}

double PathCT::value_at(double t) const { return states[jumps_until(t)]; }

PathDiscrete run_chain(const ChainSpec& spec, double x0, std::size_t n, RandomStream& rng) {
  PathDiscrete p;
  p.x0 = x0;
  p.seed = rng.seed();
  p.states.resize(n + 1);
  p.states[0] = x0;
  double x = x0;
  for (std::size_t k = 1; k <= n; ++k) {
    x = transition_sample(spec, x, rng);
    p.states[k] = x;
  }
  return p;
}

PathCT subordinate(const ChainSpec& spec, double x0, const SubordinationParams& p, double horizon,
                   const RandomStream& rng) {
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be > 0");
  SubordinationParams::make(p.a, p.kappa);
  PathCT out;
  out.params = p;
  out.horizon = horizon;
  out.seed = rng.seed();
  RandomStream clock = rng.split(1);
  double t = clock.exponential() / p.kappa;
  while (t <= horizon) {
    out.jump_times.push_back(t);
    t += clock.exponential() / p.kappa;
  }
  RandomStream chain = rng.split(0);
  out.states.resize(out.jump_times.size() + 1);
  double x = x0 / p.a;
  out.states[0] = x0;
  for (std::size_t k = 1; k < out.states.size(); ++k) {
    x = transition_sample(spec, x, chain);
    out.states[k] = p.a * x;
  }
  return out;
}

ScaledPath scaled_periodic_path(const ChainSpec& spec, double x0, double n, double horizon,
                                const RandomStream& rng) {
  const auto* pp = std::get_if<PeriodicPareto>(&spec);
  if (!pp) throw PreconditionError("scaled_periodic_path needs a periodic Pareto spec");
  if (!(n >= 1.0)) throw PreconditionError("scaling index n must be >= 1");
  ScaledPath out;
  out.alpha0 = pp->alpha.lower();
  const auto plateau = pp->alpha.plateau();
  out.plateau_warning = pp->alpha.kind() != ProfileKind::Constant &&
                        (!plateau || !(plateau->length > 0.0) || plateau->value > out.alpha0);
  out.path = subordinate(spec, x0, {1.0, 1.0}, n * horizon, rng);
  const double space = std::pow(n, -1.0 / out.alpha0);
  for (double& t : out.path.jump_times) t /= n;
  for (double& x : out.path.states) x *= space;
  out.path.horizon = horizon;
  return out;
}

ChainSpec approx_chain(const Profile& alpha, const Profile& gamma, double m) {
  if (!(m >= 1.0)) throw PreconditionError("approximation index m must be >= 1");
  return make_stable_kernel(alpha, gamma.scaled(1.0 / m));
}

double BumpFunction::operator()(double z) const {
  const double u = (z - center) / radius;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double generator_apply(const ChainSpec& spec, const SubordinationParams& p, const BumpFunction& f,
                       double x, const QuadConfig& quad) {
  SubordinationParams::make(p.a, p.kappa);
  const double base = x / p.a;
  const double fx = f(x);
  if (is_discrete(spec)) {
    const Pmf& pmf = jump_pmf(spec, std::round(base));
    double lo = (f.center - f.radius - x) / p.a, hi = (f.center + f.radius - x) / p.a;
    if (lo > hi) std::swap(lo, hi);
    double s = 0.0;
    for (long j = static_cast<long>(std::floor(lo)); j <= static_cast<long>(std::ceil(hi)); ++j)
      s += f(x + p.a * static_cast<double>(j)) * pmf.prob(j);
    return p.kappa * (s - fx);
  }
  double lo = (f.center - f.radius - x) / p.a, hi = (f.center + f.radius - x) / p.a;
  if (lo > hi) std::swap(lo, hi);
  std::vector<double> cuts{lo};
  if (std::holds_alternative<PeriodicPareto>(spec)) {
    for (double c : {-1.0, 1.0})
      if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);
  QuadConfig q = quad;
  q.abs_tol = std::max(quad.abs_tol, 1e-11);
  auto integrand = [&](double v) { return f(x + p.a * v) * transition_density(spec, base, base + v, quad); };
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate(integrand, cuts[i], cuts[i + 1], q).value;
  return p.kappa * (s - fx);
}

namespace {

// Inverse CDF of the jump from x, for stratifying the first step.
std::function<double(double)> jump_quantile(const ChainSpec& spec, double x) {
  if (auto* pp = std::get_if<PeriodicPareto>(&spec)) {
    const double a = pp->alpha(x);
    const double c = pareto_scale(a);
    return [a, c](double u) {
      const double lower = c / a;
      if (u < lower) return -std::pow(a * u / c, -1.0 / a);
      if (u <= lower + 2.0 * c) return -1.0 + (u - lower) / c;
      return std::pow(a * (1.0 - u) / c, -1.0 / a);
    };
  }
  auto table = std::make_shared<StableCdfTable>(jump_stable_params(spec, x));
  return [table](double u) { return table->quantile(u); };
}

}  // namespace

std::vector<double> semigroup_difference_quotients(const ChainSpec& spec,
                                                   const SubordinationParams& p,
                                                   const BumpFunction& f, double x,
                                                   const std::vector<double>& h_list,
                                                   std::size_t runs, const RandomStream& rng,
                                                   int n_max) {
  SubordinationParams::make(p.a, p.kappa);
  if (runs == 0 || n_max < 1) throw PreconditionError("need runs >= 1 and n_max >= 1");
  const double base = x / p.a;
  std::vector<double> m(static_cast<std::size_t>(n_max) + 1, 0.0);  // m[n] = E f(a X_n)
  m[0] = f(x);
  std::function<double(double)> quantile;
  if (!is_discrete(spec)) quantile = jump_quantile(spec, base);
  for (std::size_t r = 0; r < runs; ++r) {
    RandomStream s = rng.split(r);
    double xs;
    if (quantile) {
      const double u = (static_cast<double>(r) + s.uniform()) / static_cast<double>(runs);
      xs = base + quantile(u);
    } else {
      xs = transition_sample(spec, base, s);
    }
    m[1] += f(p.a * xs);
    for (int n = 2; n <= n_max; ++n) {
      xs = transition_sample(spec, xs, s);
      m[static_cast<std::size_t>(n)] += f(p.a * xs);
    }
  }
  for (std::size_t n = 1; n < m.size(); ++n) m[n] /= static_cast<double>(runs);
  std::vector<double> out;
  for (double h : h_list) {
    if (!(h > 0.0)) throw PreconditionError("h must be > 0");
    const double lam = p.kappa * h;
    double weight = std::exp(-lam);
    double acc = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      weight *= lam / n;
      acc += weight * (m[static_cast<std::size_t>(n)] - m[0]);
    }
    out.push_back(acc / h);
  }
  return out;
}

// ---------------------------------------------------------------- exports

namespace {

constexpr char kMagic[8] = {'S', 'L', 'T', 'R', 'A', 'C', 'E', '\0'};
constexpr std::uint32_t kTraceVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  T v;
  char buf[sizeof(T)];
  is.read(buf, sizeof(T));
  if (!is) throw Error("truncated trace file");
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

std::ofstream open_out(const std::string& file, bool binary) {
  std::ofstream os(file, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot open " + file + " for writing");
  return os;
}

void write_records(const std::string& file, std::uint32_t kind, double horizon,
                   const std::vector<TraceRecord>& recs) {
  auto os = open_out(file, true);
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kTraceVersion);
  put_le<std::uint32_t>(os, kind);
  put_le<std::uint64_t>(os, recs.size());
  put_le<double>(os, horizon);
  for (const auto& r : recs) {
    put_le<double>(os, r.t);
    put_le<double>(os, r.x);
  }
}

}  // namespace

void write_csv(const PathDiscrete& path, const std::string& file) {
  auto os = open_out(file, false);
  os << "step_or_time,state\n" << std::setprecision(17);
  for (std::size_t k = 0; k < path.states.size(); ++k) os << k << ',' << path.states[k] << '\n';
}

void write_csv(const PathCT& path, const std::string& file) {
  auto os = open_out(file, false);
  os << "step_or_time,state\n" << std::setprecision(17);
  os << 0.0 << ',' << path.states[0] << '\n';
  for (std::size_t k = 0; k < path.jump_times.size(); ++k)
    os << path.jump_times[k] << ',' << path.states[k + 1] << '\n';
}

void write_trace(const PathDiscrete& path, const std::string& file) {
  std::vector<TraceRecord> recs;
  for (std::size_t k = 0; k < path.states.size(); ++k)
    recs.push_back({static_cast<double>(k), path.states[k]});
  write_records(file, 0, 0.0, recs);
}

void write_trace(const PathCT& path, const std::string& file) {
  std::vector<TraceRecord> recs{{0.0, path.states[0]}};
  for (std::size_t k = 0; k < path.jump_times.size(); ++k)
    recs.push_back({path.jump_times[k], path.states[k + 1]});
  write_records(file, 1, path.horizon, recs);
}

std::vector<TraceRecord> read_trace(const std::string& file, std::uint32_t* kind) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("cannot open " + file);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw Error("not a trace file: " + file);
  if (get_le<std::uint32_t>(is) != kTraceVersion) throw Error("unsupported trace version");
  const auto k = get_le<std::uint32_t>(is);
  if (kind) *kind = k;
  const auto n = get_le<std::uint64_t>(is);
  get_le<double>(is);  // horizon
  std::vector<TraceRecord> recs(n);
  for (auto& r : recs) {
    r.t = get_le<double>(is);
    r.x = get_le<double>(is);
  }
  return recs;
}

}  // namespace stablelike
