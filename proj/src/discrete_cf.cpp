#include "stablelike/discrete_cf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stablelike/errors.hpp"
#include "stablelike/parallel.hpp"
#include "stablelike/special.hpp"
#include "stablelike/stats.hpp"

namespace stablelike {

namespace {

constexpr double kPi = std::numbers::pi;

// Parity split and tail probabilities of a symmetric pmf.
struct PmfView {
  explicit PmfView(const Pmf& p) : pmf(p) {
    const long J = p.J();
    const auto& b = p.body();
    suffix.assign(static_cast<std::size_t>(J) + 2, 0.0);
    for (long j = J; j >= 1; --j) suffix[j] = suffix[j + 1] + b[j - 1];
    even = p.atom0();
    for (long j = 2; j <= J; j += 2) even += 2.0 * b[j - 1];
    if (p.tail_kappa() > 0.0) {
      const double s = p.tail_alpha() + 1.0;
      const double m0 = std::floor(static_cast<double>(J) / 2.0) + 1.0;
      even += 2.0 * p.tail_kappa() * std::pow(2.0, -s) * hurwitz_zeta(s, m0).value;
    }
    odd = p.mass() - even;
  }

  // P(|X| >= t) for real t > 0.
  double tail_at_least(double t) const {
    const double jmin = std::max(1.0, std::ceil(t));
    const long J = pmf.J();
    if (jmin > static_cast<double>(J)) {
      if (pmf.tail_kappa() == 0.0) return 0.0;
      return 2.0 * pmf.tail_kappa() * hurwitz_zeta(pmf.tail_alpha() + 1.0, jmin).value;
    }
    return 2.0 * suffix[static_cast<std::size_t>(jmin)] + pmf.tail_mass();
  }

  const Pmf& pmf;
  std::vector<double> suffix;  // suffix[j] = sum_{k >= j, k <= J} p(k)
  double even = 0.0, odd = 0.0;
};

// Evaluator for 1 - phi that keeps the polylog expansion of the tail.
class DeficitEvaluator {
 public:
  explicit DeficitEvaluator(const Pmf& pmf) : pmf_(pmf) {
    if (pmf.tail_kappa() > 0.0) ds_.emplace(pmf.tail_alpha() + 1.0);
  }

  SeriesValue operator()(double xi) const {
    xi = std::remainder(xi, 2.0 * kPi);
    xi = std::abs(xi);
    const auto& b = pmf_.body();
    const long J = pmf_.J();
    double body = 0.0, head = 0.0;
    const double s = pmf_.tail_alpha() + 1.0;
    for (long j = 1; j <= J; ++j) {
      const double sn = std::sin(0.5 * static_cast<double>(j) * xi);
      const double w = 2.0 * sn * sn;  // 1 - cos(j xi)
      body += b[j - 1] * w;
      if (ds_) head += std::pow(static_cast<double>(j), -s) * w;
    }
    SeriesValue out{2.0 * body, 0.0};
    if (ds_) {
      const SeriesValue d = (*ds_)(xi);
      const double kappa = pmf_.tail_kappa();
      out.value += 2.0 * kappa * (d.value - head);
      out.error_bound = 2.0 * kappa * d.error_bound;
    }
    out.error_bound += 8.0 * std::numeric_limits<double>::epsilon() * out.value;
    return out;
  }

 private:
  const Pmf& pmf_;
  std::optional<PowerCosineDeficit> ds_;
};

LinearFit fit_model(const std::vector<double>& g, const std::vector<double>& y) {
  return linear_fit(g, y);
}

}  // namespace

DiscreteChainSpec make_discrete_spec(std::vector<double> alphas, long J) {
  return std::get<DiscretePowerLaw>(make_discrete_chain(std::move(alphas), J));
}

EmbeddedWalk embedded_jump_dist(const DiscreteChainSpec& spec, int parity, long J, double tol) {
  if (spec.pmfs.size() != 2) throw PreconditionError("embedded walk needs a period-2 spec");
  if (parity != 0 && parity != 1) throw PreconditionError("parity must be 0 or 1");
  if (J < 1) throw PreconditionError("embedded walk table size J must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) throw PreconditionError("tol must lie in (0,1)");

  const Pmf& own = spec.pmfs[static_cast<std::size_t>(parity)];
  const Pmf& oth = spec.pmfs[static_cast<std::size_t>(1 - parity)];
  const PmfView vown(own), voth(oth);

  EmbeddedWalk ew;
  ew.parity = parity;
  ew.J = J;
  ew.J_work = 4 * J;
  ew.C = voth.even;
  if (!(ew.C < 1.0)) throw NumericalError("other-class return probability C >= 1", ew.C);
  ew.k_max = ew.C > 0.0 ? static_cast<int>(std::ceil(std::log(0.5 * tol) / std::log(ew.C))) : 0;
  ew.k_max = std::max(ew.k_max, 0);
  ew.C_kmax = std::pow(ew.C, ew.k_max);

  // Offsets from the start state, in original units. The table covers even
  // offsets |d| <= 2J, the working window odd offsets |y| <= W.
  const long D = 2 * J, W = 2 * ew.J_work;
  std::vector<double> k_oth(static_cast<std::size_t>(4 * W + 1));  // oth.prob(v), |v| <= 2W
  for (long v = -2 * W; v <= 2 * W; ++v) k_oth[static_cast<std::size_t>(v + 2 * W)] = oth.prob(v);
  auto kern = [&](long v) { return k_oth[static_cast<std::size_t>(v + 2 * W)]; };

  std::vector<double> q(static_cast<std::size_t>(D + 1), 0.0);  // q[d], d = 0..D even
  double direct_table = 0.0;
  for (long d = 0; d <= D; d += 2) {
    q[d] = own.prob(d);
    direct_table += (d == 0 ? 1.0 : 2.0) * q[d];
  }
  double tail = vown.even - direct_table;

  std::vector<double> e(static_cast<std::size_t>(2 * W + 1), 0.0), next(e.size());
  auto at = [&](std::vector<double>& v, long y) -> double& { return v[static_cast<std::size_t>(y + W)]; };
  double mass_e = 0.0;
  for (long y = -W + 1; y <= W - 1; y += 2) {
    at(e, y) = own.prob(y);
    mass_e += at(e, y);
  }
  double escaped = vown.odd - mass_e;

  for (int k = 0; k < ew.k_max && mass_e > 0.0; ++k) {
    // Final odd jump back to the target class.
    double into_table = 0.0;
    for (long d = 0; d <= D; d += 2) {
      double acc = 0.0;
      for (long y = -W + 1; y <= W - 1; y += 2) acc += at(e, y) * kern(d - y);
      q[d] += acc;
      into_table += (d == 0 ? 1.0 : 2.0) * acc;
    }
    tail += mass_e * voth.odd - into_table;
    // Another even jump inside the other class.
    double mass_next = 0.0;
    for (long y2 = -W + 1; y2 <= W - 1; y2 += 2) {
      double acc = 0.0;
      for (long y = -W + 1; y <= W - 1; y += 2) acc += at(e, y) * kern(y2 - y);
      at(next, y2) = acc;
      mass_next += acc;
    }
    escaped += mass_e * voth.even - mass_next;
    e.swap(next);
    mass_e = mass_next;
  }
  ew.remaining = mass_e;
  ew.escaped = std::max(escaped, 0.0);

  // Chance that mass beyond the window lands back within the table: the rest of
  // the excursion has K steps, P(K = k) = C^{k-1}(1-C), and must cover L.
  const double L = static_cast<double>(W + 1 - D);
  double B = 0.0;
  for (int k = 1; k <= 100000; ++k) {
    const double kk = static_cast<double>(k);
    const double w = (kk - 1.0) * (k >= 2 ? std::pow(ew.C, kk - 2.0) : 0.0) * (1.0 - ew.C) +
                     std::pow(ew.C, kk - 1.0);
    const double term = voth.tail_at_least(L / kk) * w;
    B += term;
    if (w < 1e-18) break;
  }
  ew.return_bound = std::min(B, 1.0);
  ew.error_bound = ew.remaining + ew.escaped * ew.return_bound;

  // Represent the sublattice walk: body from the table, tail as a power law
  // with the heavier of the two exponents carrying all mass past the table.
  const double a_min = std::min(own.tail_alpha(), oth.tail_alpha());
  ew.tail_mass = std::max(tail, 0.0) + ew.escaped;
  std::vector<double> body(static_cast<std::size_t>(J));
  for (long i = 1; i <= J; ++i) body[i - 1] = q[2 * i];
  const double zeta_tail = hurwitz_zeta(a_min + 1.0, static_cast<double>(J) + 1.0).value;
  const double kappa = ew.tail_mass / (2.0 * zeta_tail);
  ew.jump_pmf = Pmf(q[0], std::move(body), kappa, a_min, 10.0 * ew.remaining + 1e-10);
  ew.deficit = std::max(0.0, 1.0 - ew.jump_pmf.mass());

  if (ew.error_bound > tol) {
    throw NumericalError("embedded walk error bound " + std::to_string(ew.error_bound) +
                             " exceeds tol; increase J or k_max",
                         ew.error_bound);
  }
  return ew;
}

SeriesValue one_minus_cf(const Pmf& pmf, double xi) { return DeficitEvaluator(pmf)(xi); }

double cf_of_pmf(const Pmf& pmf, double xi) { return 1.0 - one_minus_cf(pmf, xi).value; }

std::string model_name(DivergenceModel m) {
  switch (m) {
    case DivergenceModel::Bounded:
      return "bounded";
    case DivergenceModel::Logarithmic:
      return "log";
    case DivergenceModel::Power:
      break;
  }
  return "power";
}

std::vector<double> default_eps_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(std::pow(10.0, -1.0 - 0.5 * i));
  return g;
}

ChungFuchsProfile chung_fuchs_profile(const Pmf& pmf, const std::vector<double>& eps_grid,
                                      const QuadConfig& quad) {
  if (eps_grid.size() < 3) throw PreconditionError("eps_grid needs at least 3 values");
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] > 0.0 && eps_grid[i] < kPi))
      throw PreconditionError("eps_grid values must lie in (0, pi)");
    if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
      throw PreconditionError("eps_grid must be strictly decreasing");
  }
  const DeficitEvaluator deficit(pmf);
  auto inv = [&](double xi) {
    const SeriesValue v = deficit(xi);
    if (!(v.value > v.error_bound)) throw PreconditionError("non-aperiodic support: 1 - phi vanishes at xi > 0");
    return 1.0 / v.value;
  };

  QuadConfig panel = quad;
  panel.rel_tol = std::max(quad.rel_tol, 1e-10);
  auto piece = [&](double lo, double hi, double& err) {
    const int n = std::max(1, static_cast<int>(std::ceil(std::log2(hi / lo))));
    const double r = std::pow(hi / lo, 1.0 / n);
    double sum = 0.0, a = lo;
    for (int i = 0; i < n; ++i) {
      const double b = i + 1 == n ? hi : a * r;
      const QuadResult res = integrate(inv, a, b, panel);
      sum += res.value;
      err += res.error;
      a = b;
    }
    return sum;
  };

  ChungFuchsProfile prof;
  prof.eps = eps_grid;
  double total = 0.0, err = 0.0, upper = kPi;
  for (double e : eps_grid) {
    total += piece(e, upper, err);
    prof.integral.push_back(total);
    prof.integral_error.push_back(err);
    upper = e;
  }

  // Local exponent of 1 - phi on the smallest decade of the grid.
  prof.fit_lo = eps_grid.back();
  prof.fit_hi = std::min(10.0 * prof.fit_lo, kPi);
  std::vector<double> lx, ly;
  for (int i = 0; i <= 20; ++i) {
    const double xi = prof.fit_lo * std::pow(prof.fit_hi / prof.fit_lo, i / 20.0);
    lx.push_back(std::log(xi));
    ly.push_back(std::log(deficit(xi).value));
  }
  const LinearFit lf = linear_fit(lx, ly);
  prof.local_exponent = lf.slope;
  prof.exponent_residual = lf.rms_residual;

  // Model selection for the growth of I(eps).
  const double a = prof.local_exponent;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> glog, gpow;
  for (double e : eps_grid) {
    glog.push_back(std::log(1.0 / e));
    gpow.push_back(std::pow(e, 1.0 - a));
  }
  prof.residual_log = fit_model(glog, prof.integral).rms_residual;
  const double rpow = a != 1.0 ? fit_model(gpow, prof.integral).rms_residual : nan;
  prof.residual_bounded = a < 1.0 ? rpow : nan;
  prof.residual_power = a > 1.0 ? rpow : nan;
  // As a -> 1 the power models collapse onto the log model; a power model
  // has to beat it clearly to be chosen.
  prof.model = DivergenceModel::Logarithmic;
  if (a != 1.0 && rpow < 0.9 * prof.residual_log) {
    prof.model = a < 1.0 ? DivergenceModel::Bounded : DivergenceModel::Power;
  }
  prof.diverging = prof.model != DivergenceModel::Bounded;
  return prof;
}

DiscreteClassification classify_discrete(const DiscreteChainSpec& spec, long J, double tol,
                                         const std::vector<double>& eps_grid,
                                         double exponent_margin) {
  if (spec.pmfs.empty()) throw PreconditionError("discrete spec has no residues");
  if (!(exponent_margin > 0.0 && exponent_margin < 1.0))
    throw PreconditionError("exponent margin must lie in (0,1)");
  DiscreteClassification out;
  const std::size_t m = spec.pmfs.size();
  if (m == 1) {
    out.route = "random_walk";
    out.profile = chung_fuchs_profile(spec.pmfs[0], eps_grid);
  } else if (m == 2) {
    out.route = "embedded";
    const int parity = spec.alphas[1] < spec.alphas[0] ? 1 : 0;
    out.embedded = embedded_jump_dist(spec, parity, J, tol);
    out.has_embedded = true;
    out.profile = chung_fuchs_profile(out.embedded.jump_pmf, eps_grid);
  } else {
    // Symmetrized surrogate: the residue mixture, tail on the smallest index.
    out.route = "heuristic";
    long Jm = spec.pmfs[0].J();
    double a_min = spec.alphas[0];
    for (std::size_t i = 0; i < m; ++i) {
      Jm = std::min(Jm, spec.pmfs[i].J());
      a_min = std::min(a_min, spec.alphas[i]);
    }
    std::vector<double> body(static_cast<std::size_t>(Jm), 0.0);
    double atom = 0.0, mass = 0.0;
    for (const auto& p : spec.pmfs) {
      atom += p.atom0() / static_cast<double>(m);
      for (long j = 1; j <= Jm; ++j) body[j - 1] += p.body()[j - 1] / static_cast<double>(m);
    }
    mass = atom;
    for (double b : body) mass += 2.0 * b;
    const double kappa = (1.0 - mass) / (2.0 * hurwitz_zeta(a_min + 1.0, Jm + 1.0).value);
    out.profile = chung_fuchs_profile(Pmf(atom, std::move(body), kappa, a_min), eps_grid);
  }

  const double a = out.profile.local_exponent;
  const double lo = 1.0 - exponent_margin, hi = 1.0 + exponent_margin;
  out.margin = std::max(lo - a, a - hi);
  if (a < lo && !out.profile.diverging) {
    out.verdict = Verdict::TransientLeaning;
    out.reason = "local exponent below 1 and I(eps) bounded";
  } else if (a > hi && out.profile.diverging) {
    out.verdict = Verdict::RecurrentLeaning;
    out.reason = "local exponent above 1 and I(eps) diverging (integral oracle)";
  } else {
    out.verdict = Verdict::Inconclusive;
    out.reason = "local exponent within the margin of 1 or model disagrees";
  }
  return out;
}

AttractionReport attraction_check(const Pmf& pmf, double alpha, const std::vector<long>& n_list,
                                  std::size_t n_samples, std::uint64_t seed, int threads) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw PreconditionError("attraction_check needs alpha in (0,2)");
  if (n_list.empty()) throw PreconditionError("n_list is empty");
  for (long n : n_list)
    if (n < 1) throw PreconditionError("n_list entries must be >= 1");
  if (n_samples < 2) throw PreconditionError("n_samples must be >= 2");

  AttractionReport rep;
  rep.n_list = n_list;
  std::vector<std::vector<double>> draws(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const long n = n_list[i];
    const double scale = std::pow(static_cast<double>(n), -1.0 / alpha);
    const RandomStream master(derive_seed(seed, static_cast<std::uint64_t>(n)));
    auto& z = draws[i];
    z.assign(n_samples, 0.0);
    parallel_for(n_samples, threads, [&](std::size_t r) {
      RandomStream rng = master.split(r);
      double s = 0.0;
      for (long k = 0; k < n; ++k) s += pmf.sample(rng);
      z[r] = s * scale;
    });
  }

  // The limit law's tail c|y|^{-alpha-1} must carry the pmf's tail constant.
  rep.limit_gamma = pmf.tail_kappa() * kPi / (std::tgamma(alpha + 1.0) * std::sin(kPi * alpha / 2.0));
  const StableCdfTable table(StableParams::make(alpha, rep.limit_gamma));
  for (auto& z : draws) rep.ks.push_back(ks_statistic(z, [&](double y) { return table(y); }));

  // Median |Z| matching at the largest n.
  const auto largest = static_cast<std::size_t>(
      std::max_element(n_list.begin(), n_list.end()) - n_list.begin());
  std::vector<double> absz;
  for (double v : draws[largest]) absz.push_back(std::abs(v));
  const StableCdfTable unit(StableParams::make(alpha, 1.0));
  const double m1 = unit.quantile(0.75);
  rep.fitted_gamma = std::pow(median(absz) / m1, alpha);

  std::vector<std::size_t> order(n_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return n_list[a] < n_list[b]; });
  const double noise = 1.0 / std::sqrt(static_cast<double>(n_samples));
  rep.non_increasing = true;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (rep.ks[order[i]] > rep.ks[order[i - 1]] + noise) rep.non_increasing = false;
  return rep;
}

}  // namespace stablelike
