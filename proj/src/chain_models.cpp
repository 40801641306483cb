#include "stablelike/chain_models.hpp"

#include <algorithm>
#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "stablelike/errors.hpp"
#include "stablelike/special.hpp"

namespace stablelike {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

bool in_open(double v, double lo, double hi) { return v > lo && v < hi; }

void require_alpha(double a, const std::string& name) {
  require(in_open(a, 0.0, 2.0), name + " must lie in (0,2)");
}

void require_positive(double v, const std::string& name) {
  require(v > 0.0 && std::isfinite(v), name + " must be > 0");
}

double wrap(double x, double tau) {
  double r = std::fmod(x, tau);
  if (r < 0.0) r += tau;
  if (r >= tau) r = 0.0;
  return r;
}

}  // namespace

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * (3.0 - 2.0 * u);
}

// ---------------------------------------------------------------- Profile

Profile Profile::constant(double v) {
  require(std::isfinite(v), "profile value must be finite");
  Profile p;
  p.kind_ = ProfileKind::Constant;
  p.params_ = {v};
  p.lower_ = p.upper_ = v;
  return p;
}

Profile Profile::step(double left, double right) {
  Profile p;
  p.kind_ = ProfileKind::Step;
  p.params_ = {left, right};
  p.lower_ = std::min(left, right);
  p.upper_ = std::max(left, right);
  return p;
}

Profile Profile::smoothed_step(double left, double right, double k) {
  require_positive(k, "k");
  Profile p;
  p.kind_ = ProfileKind::SmoothedStep;
  p.params_ = {left, right, k};
  p.lower_ = std::min(left, right);
  p.upper_ = std::max(left, right);
  return p;
}

Profile Profile::periodic_plateau(double tau, double base, double peak, double plateau_fraction,
                                  double ramp_fraction) {
  require_positive(tau, "tau");
  require(peak > base, "periodic plateau profile needs peak > base");
  require(in_open(plateau_fraction, 0.0, 1.0), "plateau_fraction must lie in (0,1)");
  require(ramp_fraction > 0.0 && ramp_fraction <= 0.5, "ramp_fraction must lie in (0,0.5]");
  Profile p;
  p.kind_ = ProfileKind::PeriodicPlateau;
  p.params_ = {tau, base, peak, plateau_fraction, ramp_fraction};
  p.plateau_ = Plateau{base, 0.0, plateau_fraction * tau};
  p.lower_ = base;
  p.upper_ = peak;
  return p;
}

Profile Profile::periodic_table(double tau, std::vector<double> values,
                                std::optional<Plateau> plateau) {
  require_positive(tau, "tau");
  require(values.size() >= 2, "tabulated profile needs >= 2 values");
  for (double v : values) require(std::isfinite(v), "tabulated profile values must be finite");
  if (plateau) {
    require(plateau->length >= 0.0 && plateau->length <= tau, "plateau length must lie in [0,tau]");
  }
  Profile p;
  p.kind_ = ProfileKind::PeriodicTable;
  p.params_ = {tau};
  p.lower_ = *std::min_element(values.begin(), values.end());
  p.upper_ = *std::max_element(values.begin(), values.end());
  p.table_ = std::move(values);
  p.plateau_ = plateau;
  return p;
}

std::optional<double> Profile::period() const {
  if (kind_ == ProfileKind::PeriodicPlateau || kind_ == ProfileKind::PeriodicTable)
    return params_[0];
  return std::nullopt;
}

double Profile::operator()(double x) const {
  switch (kind_) {
    case ProfileKind::Constant:
      return params_[0];
    case ProfileKind::Step:
      return x < 0.0 ? params_[0] : params_[1];
    case ProfileKind::SmoothedStep: {
      const double k = params_[2];
      const double s = smoothstep((x + k) / (2.0 * k));
      return params_[0] + (params_[1] - params_[0]) * s;
    }
    case ProfileKind::PeriodicPlateau: {
      const double tau = params_[0], base = params_[1], peak = params_[2];
      const double lp = params_[3] * tau;
      const double r = params_[4];
      const double x0 = wrap(x, tau);
      if (x0 < lp) return base;
      const double v = (x0 - lp) / (tau - lp);
      double s = 1.0;
      if (v < r) {
        s = smoothstep(v / r);
      } else if (v > 1.0 - r) {
        s = smoothstep((1.0 - v) / r);
      }
      return base + (peak - base) * s;
    }
    case ProfileKind::PeriodicTable: {
      const double tau = params_[0];
      const auto n = table_.size();
      const double pos = wrap(x, tau) / tau * static_cast<double>(n);
      auto i = static_cast<std::size_t>(pos);
      if (i >= n) i = n - 1;
      const double t = pos - static_cast<double>(i);
      return table_[i] + t * (table_[(i + 1) % n] - table_[i]);
    }
  }
  return params_[0];
}

Profile Profile::scaled(double c) const {
  require_positive(c, "scale factor");
  Profile p = *this;
  switch (kind_) {
    case ProfileKind::Constant:
      p.params_[0] *= c;
      break;
    case ProfileKind::Step:
    case ProfileKind::SmoothedStep:
      p.params_[0] *= c;
      p.params_[1] *= c;
      break;
    case ProfileKind::PeriodicPlateau:
      p.params_[1] *= c;
      p.params_[2] *= c;
      if (p.plateau_) p.plateau_->value *= c;
      break;
    case ProfileKind::PeriodicTable:
      for (double& v : p.table_) v *= c;
      if (p.plateau_) p.plateau_->value *= c;
      break;
  }
  p.lower_ *= c;
  p.upper_ *= c;
  return p;
}

// ---------------------------------------------------------------- Pmf

Pmf::Pmf(double atom0, std::vector<double> body, double tail_kappa, double tail_alpha,
         double mass_tol)
    : atom0_(atom0), body_(std::move(body)), kappa_(tail_kappa), alpha_(tail_alpha) {
  require(atom0_ >= 0.0, "pmf atom must be >= 0");
  for (double v : body_) require(v >= 0.0 && std::isfinite(v), "pmf body must be >= 0");
  require(kappa_ >= 0.0, "pmf tail weight must be >= 0");
  if (kappa_ > 0.0) {
    require_alpha(alpha_, "pmf tail alpha");
    const auto hz = hurwitz_zeta(alpha_ + 1.0, static_cast<double>(body_.size()) + 1.0);
    tail_mass_ = 2.0 * kappa_ * hz.value;
    tail_mass_err_ = 2.0 * kappa_ * hz.error_bound;
  }
  double body_mass = 0.0;
  for (auto it = body_.rbegin(); it != body_.rend(); ++it) body_mass += *it;
  mass_ = atom0_ + 2.0 * body_mass + tail_mass_;
  require(std::abs(mass_ - 1.0) <= mass_tol, "pmf total mass " + std::to_string(mass_) + " differs from 1");

  // Vose alias table over categories 0 (atom), 1..J (|j|), J+1 (tail).
  const std::size_t n = body_.size() + 2;
  std::vector<double> w(n);
  w[0] = atom0_;
  for (std::size_t j = 0; j < body_.size(); ++j) w[j + 1] = 2.0 * body_[j];
  w[n - 1] = tail_mass_;
  double total = 0.0;
  for (double v : w) total += v;
  alias_prob_.assign(n, 0.0);
  alias_index_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = w[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    alias_prob_[s] = scaled[s];
    alias_index_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) alias_prob_[i] = 1.0;
  for (auto i : small) alias_prob_[i] = 1.0;
}

double Pmf::prob(long j) const {
  const long a = std::labs(j);
  if (a == 0) return atom0_;
  if (a <= J()) return body_[static_cast<std::size_t>(a - 1)];
  return kappa_ > 0.0 ? kappa_ * std::pow(static_cast<double>(a), -alpha_ - 1.0) : 0.0;
}

double Pmf::sample_tail(RandomStream& rng) const {
  // Proposal: continuous Pareto on [J+1/2, inf) rounded to the nearest integer.
  // Accept with j^{-s} / int_{j-1/2}^{j+1/2} x^{-s} dx <= 1 (convexity), which is exact.
  const double s = alpha_ + 1.0;
  const double x0 = static_cast<double>(J()) + 0.5;
  for (;;) {
    const double x = x0 * std::pow(rng.uniform(), -1.0 / alpha_);
    const double j = std::floor(x + 0.5);
    const double cell = (std::pow(j - 0.5, 1.0 - s) - std::pow(j + 0.5, 1.0 - s)) / (s - 1.0);
    if (rng.uniform() * cell <= std::pow(j, -s)) return j;
  }
}

double Pmf::sample(RandomStream& rng) const {
  const std::size_t n = alias_prob_.size();
  const double u = rng.uniform() * static_cast<double>(n);
  auto i = static_cast<std::size_t>(u);
  if (i >= n) i = n - 1;
  const double frac = u - static_cast<double>(i);
  const std::size_t cat = frac < alias_prob_[i] ? i : alias_index_[i];
  if (cat == 0) return 0.0;
  const double sign = (rng.next_u64() >> 63) ? -1.0 : 1.0;
  if (cat == n - 1) return sign * sample_tail(rng);
  return sign * static_cast<double>(cat);
}

Pmf Pmf::two_point() { return Pmf(0.0, {0.5}, 0.0, 1.0); }

Pmf make_discrete_pmf(double alpha, long J) {
  require_alpha(alpha, "alpha");
  require(J >= 1, "J must be >= 1");
  const double s = alpha + 1.0;
  const double kappa = 0.5 / boost::math::zeta(s);
  std::vector<double> body(static_cast<std::size_t>(J));
  for (long j = 1; j <= J; ++j) body[static_cast<std::size_t>(j - 1)] = kappa * std::pow(j, -s);
  return Pmf(0.0, std::move(body), kappa, alpha);
}

// ---------------------------------------------------------------- specs

ChainSpec make_stable_kernel(Profile alpha, Profile gamma) {
  require(alpha.lower() > 0.0 && alpha.upper() <= 2.0, "alpha profile must take values in (0,2]");
  require(gamma.lower() > 0.0, "scale profile must be positive");
  std::optional<StableSampler> fixed;
  if (alpha.kind() == ProfileKind::Constant && gamma.kind() == ProfileKind::Constant)
    fixed.emplace(StableParams{alpha(0.0), gamma(0.0)});
  return StableKernel{std::move(alpha), std::move(gamma), fixed};
}

ChainSpec make_step_chain(double alpha, double beta, double gamma, double delta) {
  require_alpha(alpha, "alpha");
  require_alpha(beta, "beta");
  require_positive(gamma, "gamma");
  require_positive(delta, "delta");
  return StepChain{alpha, beta, gamma, delta, StableSampler({alpha, gamma}),
                   StableSampler({beta, delta})};
}

ChainSpec make_smoothed_step(double alpha, double beta, double gamma, double delta, double k) {
  require_alpha(alpha, "alpha");
  require_alpha(beta, "beta");
  require_positive(gamma, "gamma");
  require_positive(delta, "delta");
  require_positive(k, "k");
  return SmoothedStep{alpha, beta, gamma, delta, k, Profile::smoothed_step(alpha, beta, k),
                      Profile::smoothed_step(gamma, delta, k)};
}

ChainSpec make_periodic_pareto(Profile alpha, double tau) {
  require_positive(tau, "tau");
  // A constant profile is periodic with any period.
  if (alpha.kind() != ProfileKind::Constant) {
    const auto per = alpha.period();
    require(per.has_value(), "periodic Pareto chain needs a periodic alpha profile");
    require(std::abs(*per - tau) <= 1e-12 * tau, "alpha profile period differs from tau");
  }
  require(alpha.lower() > 0.0 && alpha.upper() < 2.0, "alpha profile must take values in (0,2)");
  return PeriodicPareto{std::move(alpha), tau};
}

ChainSpec make_discrete_chain(std::vector<double> alphas, long J) {
  require(!alphas.empty(), "discrete chain needs at least one residue");
  std::vector<Pmf> pmfs;
  for (double a : alphas) pmfs.push_back(make_discrete_pmf(a, J));
  return DiscretePowerLaw{std::move(alphas), J, std::move(pmfs)};
}

std::string kind_name(const ChainSpec& spec) {
  static const char* names[] = {"stable_kernel", "step", "smoothed_step", "periodic_pareto",
                                "discrete"};
  return names[spec.index()];
}

bool is_discrete(const ChainSpec& spec) { return std::holds_alternative<DiscretePowerLaw>(spec); }

namespace {

std::size_t residue(const DiscretePowerLaw& d, double x) {
  const auto m = static_cast<long>(d.alphas.size());
  long r = static_cast<long>(std::llround(x)) % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace

StableParams jump_stable_params(const ChainSpec& spec, double x) {
  if (auto* k = std::get_if<StableKernel>(&spec)) return {k->alpha(x), k->gamma(x)};
  if (auto* s = std::get_if<StepChain>(&spec))
    return x < 0.0 ? StableParams{s->alpha, s->gamma} : StableParams{s->beta, s->delta};
  if (auto* s = std::get_if<SmoothedStep>(&spec)) return {s->alpha_profile(x), s->gamma_profile(x)};
  throw PreconditionError("jump law is not stable for spec kind " + kind_name(spec));
}

double jump_alpha(const ChainSpec& spec, double x) {
  if (auto* p = std::get_if<PeriodicPareto>(&spec)) return p->alpha(x);
  if (auto* d = std::get_if<DiscretePowerLaw>(&spec)) return d->alphas[residue(*d, x)];
  return jump_stable_params(spec, x).alpha;
}

double jump_tail_constant(const ChainSpec& spec, double x) {
  if (auto* p = std::get_if<PeriodicPareto>(&spec)) {
    const double a = p->alpha(x);
    return pareto_scale(a);
  }
  if (auto* d = std::get_if<DiscretePowerLaw>(&spec)) return d->pmfs[residue(*d, x)].tail_kappa();
  return tail_constant(jump_stable_params(spec, x));
}

double transition_sample(const ChainSpec& spec, double x, RandomStream& rng) {
  switch (spec.index()) {
    case 0: {
      const auto& k = std::get<StableKernel>(spec);
      if (k.fixed) return x + (*k.fixed)(rng);
      return x + sample({k.alpha(x), k.gamma(x)}, rng);
    }
    case 1: {
      const auto& s = std::get<StepChain>(spec);
      return x + (x < 0.0 ? s.left(rng) : s.right(rng));
    }
    case 2: {
      const auto& s = std::get<SmoothedStep>(spec);
      if (x <= -s.k) return x + sample({s.alpha, s.gamma}, rng);
      if (x >= s.k) return x + sample({s.beta, s.delta}, rng);
      return x + sample({s.alpha_profile(x), s.gamma_profile(x)}, rng);
    }
    case 3: {
      const auto& p = std::get<PeriodicPareto>(spec);
      const double a = p.alpha(x);
      const double flat = a / (a + 1.0);
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      if (u1 < flat) return x + (2.0 * u2 - 1.0);
      const double mag = std::pow(u2, -1.0 / a);
      return (u1 - flat) / (1.0 - flat) < 0.5 ? x - mag : x + mag;
    }
    default: {
      const auto& d = std::get<DiscretePowerLaw>(spec);
      return x + d.pmfs[residue(d, x)].sample(rng);
    }
  }
}

double pareto_scale(double a) { return a / (2.0 * (a + 1.0)); }

double pareto_density(double a, double v) {
  const double c = pareto_scale(a);
  const double av = std::abs(v);
  return av <= 1.0 ? c : c * std::pow(av, -a - 1.0);
}

double pareto_cdf(double a, double v) {
  const double c = pareto_scale(a);
  if (v <= -1.0) return c * std::pow(-v, -a) / a;
  if (v <= 1.0) return c / a + c * (v + 1.0);
  return 1.0 - c * std::pow(v, -a) / a;
}

double transition_density(const ChainSpec& spec, double x, double y, const QuadConfig& quad) {
  if (is_discrete(spec)) throw PreconditionError("discrete spec: use pmf accessor");
  const double v = y - x;
  if (auto* p = std::get_if<PeriodicPareto>(&spec)) return pareto_density(p->alpha(x), v);
  return pdf(jump_stable_params(spec, x), v, quad);
}

double jump_probability(const ChainSpec& spec, double x, double lo, double hi,
                        const QuadConfig& quad) {
  if (is_discrete(spec)) throw PreconditionError("discrete spec: use pmf accessor");
  if (hi <= lo) return 0.0;
  if (auto* p = std::get_if<PeriodicPareto>(&spec)) {
    const double a = p->alpha(x);
    return pareto_cdf(a, hi) - pareto_cdf(a, lo);
  }
  const auto sp = jump_stable_params(spec, x);
  return cdf(sp, hi, quad) - cdf(sp, lo, quad);
}

const Pmf& jump_pmf(const ChainSpec& spec, double x) {
  const auto* d = std::get_if<DiscretePowerLaw>(&spec);
  if (!d) throw PreconditionError("jump_pmf needs a discrete spec");
  return d->pmfs[residue(*d, x)];
}

// ---------------------------------------------------------------- conditions

namespace {

// One-sided tail mass int_b^inf f_x.
double one_sided_tail(const ChainSpec& spec, double x, double b, const QuadConfig& quad) {
  if (auto* p = std::get_if<PeriodicPareto>(&spec)) {
    const double a = p->alpha(x);
    return 1.0 - pareto_cdf(a, b);
  }
  if (is_discrete(spec)) {
    const Pmf& pmf = jump_pmf(spec, x);
    const long jb = static_cast<long>(std::ceil(b));
    double s = 0.0;
    for (long j = jb; j <= pmf.J(); ++j) s += pmf.prob(j);
    const double a0 = static_cast<double>(std::max(jb, pmf.J() + 1));
    if (pmf.tail_kappa() > 0.0) s += pmf.tail_kappa() * hurwitz_zeta(pmf.tail_alpha() + 1.0, a0).value;
    return s;
  }
  return 1.0 - cdf(jump_stable_params(spec, x), b, quad);
}

double normalization_error(const ChainSpec& spec, double x, const QuadConfig& quad) {
  if (std::holds_alternative<PeriodicPareto>(spec)) {
    const double a = jump_alpha(spec, x);
    const double c = pareto_scale(a);
    return std::abs(2.0 * c + 2.0 * c / a - 1.0);
  }
  if (is_discrete(spec)) return std::abs(jump_pmf(spec, x).mass() - 1.0);
  const StableParams sp = jump_stable_params(spec, x);
  const double Y = 200.0 * sp.scale();
  QuadConfig q = quad;
  q.abs_tol = 1e-9;
  q.max_subdivisions = 2000;
  double mass = 0.0;
  double lo = 0.0;
  for (double hi = sp.scale(); lo < Y; hi *= 2.0) {
    const double h = std::min(hi, Y);
    mass += 2.0 * integrate([&](double v) { return pdf(sp, v, quad); }, lo, h, q).value;
    lo = h;
  }
  if (sp.alpha < 2.0) mass += 2.0 * tail_constant(sp) * std::pow(Y, -sp.alpha) / sp.alpha;
  return std::abs(mass - 1.0);
}

}  // namespace

ConditionReport check_conditions(const ChainSpec& spec, const std::vector<double>& y_grid,
                                 const std::vector<double>& x_grid, const ConditionTolerances& tol,
                                 const QuadConfig& quad) {
  if (x_grid.empty() || y_grid.empty()) throw PreconditionError("check_conditions needs grids");
  ConditionReport rep;
  rep.y_grid = y_grid;

  // Uniform geometric bound on the tail-ratio deviation for stable kernels with alpha < 1:
  // |ratio - 1| <= Q/(1-Q) / min_a Gamma(a+1) sin(pi a/2), Q = sup gamma / |y|^{inf alpha}.
  double a_lo = std::numeric_limits<double>::infinity(), a_hi = 0.0, g_hi = 0.0;
  const bool stable_type = !std::holds_alternative<PeriodicPareto>(spec) && !is_discrete(spec);
  for (double x : x_grid) {
    a_lo = std::min(a_lo, jump_alpha(spec, x));
    a_hi = std::max(a_hi, jump_alpha(spec, x));
    if (stable_type) g_hi = std::max(g_hi, jump_stable_params(spec, x).gamma);
  }
  double den = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 200; ++i) {
    const double a = a_lo + (a_hi - a_lo) * i / 200.0;
    den = std::min(den, std::tgamma(a + 1.0) * std::sin(kPi * a / 2.0));
  }

  for (double y : y_grid) {
    double sup = 0.0;
    for (double x : x_grid) {
      const double a = jump_alpha(spec, x);
      const double c = jump_tail_constant(spec, x);
      const double f = is_discrete(spec) ? jump_pmf(spec, x).prob(std::lround(y))
                                         : transition_density(spec, x, x + y, quad);
      sup = std::max(sup, std::abs(f * std::pow(std::abs(y), a + 1.0) / c - 1.0));
    }
    rep.sup_deviation.push_back(sup);
    double bound = std::numeric_limits<double>::quiet_NaN();
    if (stable_type && a_hi < 1.0 && std::abs(y) >= 1.0) {
      const double Q = g_hi / std::pow(std::abs(y), a_lo);
      if (Q < 1.0) bound = Q / (1.0 - Q) / den;
    }
    rep.lemma_bound.push_back(bound);
    if (!std::isnan(bound) && sup > bound)
      rep.violations.push_back("tail ratio deviation exceeds geometric bound at y=" + std::to_string(y));
  }
  if (rep.sup_deviation.back() > tol.pc3)
    rep.violations.push_back("PC3: tail ratio deviation at largest y exceeds tolerance");

  // Infimum of c over the grid, and over a full period for periodic specs.
  std::vector<double> cx = x_grid;
  if (auto* p = std::get_if<PeriodicPareto>(&spec)) {
    for (int i = 0; i < 1000; ++i) cx.push_back(p->tau * i / 1000.0);
  }
  rep.inf_c = std::numeric_limits<double>::infinity();
  for (double x : cx) rep.inf_c = std::min(rep.inf_c, jump_tail_constant(spec, x));
  if (!(rep.inf_c > 0.0)) rep.violations.push_back("PC4: infimum of c is not positive");

  rep.b_grid = {10.0, 100.0, 1000.0};
  for (double b : rep.b_grid) {
    double sup = 0.0;
    for (double x : x_grid) sup = std::max(sup, one_sided_tail(spec, x, b, quad));
    rep.sup_tail_mass.push_back(sup);
  }
  for (std::size_t i = 1; i < rep.sup_tail_mass.size(); ++i)
    if (rep.sup_tail_mass[i] > rep.sup_tail_mass[i - 1])
      rep.violations.push_back("uniform tail mass not decreasing in b");

  const double xlo = *std::min_element(x_grid.begin(), x_grid.end());
  const double xhi = *std::max_element(x_grid.begin(), x_grid.end());
  for (int i = 0; i < 16; ++i) {
    double x = xlo + (xhi - xlo) * i / 15.0;
    if (is_discrete(spec)) x = std::round(x);
    const double e = normalization_error(spec, x, quad);
    rep.normalization_error.push_back(e);
    if (e > tol.normalization)
      rep.violations.push_back("density not normalized at x=" + std::to_string(x));
  }
  return rep;
}

}  // namespace stablelike
