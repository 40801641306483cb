#include "stablelike/recurrence_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablelike/errors.hpp"
#include "stablelike/parallel.hpp"
#include "stablelike/simulate.hpp"
#include "stablelike/stats.hpp"

namespace stablelike {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::RecurrentLeaning:
      return "RecurrentLeaning";
    case Verdict::TransientLeaning:
      return "TransientLeaning";
    case Verdict::Inconclusive:
      break;
  }
  return "Inconclusive";
}

void ClassifierConfig::validate() const {
  if (horizon < 1) throw PreconditionError("classifier horizon must be >= 1");
  if (n_paths < 2) throw PreconditionError("classifier needs at least 2 paths");
  if (!(radius > 0.0)) throw PreconditionError("classifier radius must be > 0");
  if (!(burn_in > 0.0 && burn_in < 1.0)) throw PreconditionError("burn_in must lie in (0,1)");
  if (!(theta_tr < theta_rec)) throw PreconditionError("theta_tr must be < theta_rec");
  if (!(z_min >= 0.0)) throw PreconditionError("z_min must be >= 0");
  if (escape_points < 2) throw PreconditionError("escape_points must be >= 2");
  if (!(landing_floor > 0.0)) throw PreconditionError("landing_floor must be > 0");
}

namespace {

struct PathStats {
  double occupation = 0.0;
  bool late = false;
  std::vector<double> escape;
  double log_sum = 0.0;
  std::size_t cycles = 0;
};

PathStats analyse(const std::vector<double>& xs, const ClassifierConfig& cfg,
                  const std::vector<std::size_t>& grid) {
  PathStats st;
  const std::size_t n = xs.size() - 1;
  const auto start = static_cast<std::size_t>(std::ceil(cfg.burn_in * static_cast<double>(n)));
  std::size_t inside = 0;
  for (std::size_t k = start; k <= n; ++k) {
    if (std::abs(xs[k]) <= cfg.radius) ++inside;
  }
  st.occupation = static_cast<double>(inside) / static_cast<double>(n - start + 1);
  st.late = inside > 0;

  // Escape curve: suffix minima at the grid points.
  st.escape.assign(grid.size(), 0.0);
  double running = std::numeric_limits<double>::infinity();
  std::size_t gi = grid.size();
  for (std::size_t k = n + 1; k-- > 0;) {
    running = std::min(running, std::abs(xs[k]));
    while (gi > 0 && grid[gi - 1] == k) st.escape[--gi] = running;
  }

  // Overshoot cycles between successive sign changes. A cycle counts when its
  // starting landing lies outside the window and it starts within the first
  // (1 - burn_in) share of the horizon; cycles still open at the horizon are
  // dropped, so every counted start had at least N * burn_in steps to close.
  const auto cutoff = static_cast<std::size_t>(std::floor((1.0 - cfg.burn_in) * static_cast<double>(n)));
  const double floor = cfg.landing_floor * cfg.radius;
  double last_landing = 0.0;
  bool have = false;
  std::size_t last_k = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if ((xs[k - 1] < 0.0) == (xs[k] < 0.0)) continue;
    const double landing = std::max(std::abs(xs[k]), floor);
    if (have && last_landing >= cfg.radius && last_k <= cutoff) {
      st.log_sum += std::log(landing / last_landing);
      ++st.cycles;
    }
    last_landing = landing;
    last_k = k;
    have = true;
  }
  return st;
}

}  // namespace

ClassifierReport classify(const ChainSpec& spec, const ClassifierConfig& cfg) {
  cfg.validate();
  ClassifierReport rep;
  rep.config = cfg;
  const std::size_t n = cfg.horizon;
  for (std::size_t i = 0; i <= cfg.escape_points; ++i)
    rep.escape_steps.push_back(n * i / cfg.escape_points);

  std::vector<PathStats> stats(cfg.n_paths);
  const RandomStream master(cfg.seed);
  parallel_for(cfg.n_paths, cfg.threads, [&](std::size_t p) {
    RandomStream rng = master.split(p);
    const PathDiscrete path = run_chain(spec, cfg.x0, n, rng);
    stats[p] = analyse(path.states, cfg, rep.escape_steps);
  });

  double occ = 0.0, late = 0.0, total_log = 0.0;
  std::size_t cycles = 0;
  for (const auto& s : stats) {
    occ += s.occupation;
    late += s.late ? 1.0 : 0.0;
    total_log += s.log_sum;
    cycles += s.cycles;
  }
  const double m = static_cast<double>(cfg.n_paths);
  rep.occupation = occ / m;
  rep.late_return = late / m;
  for (std::size_t g = 0; g < rep.escape_steps.size(); ++g) {
    std::vector<double> col;
    for (const auto& s : stats) col.push_back(s.escape[g]);
    rep.escape_curve.push_back(median(col));
  }
  rep.crossings = cycles;
  if (cycles > 0) {
    const double mean = total_log / static_cast<double>(cycles);
    // Cluster-robust standard error with paths as clusters.
    double ss = 0.0;
    for (const auto& s : stats) {
      const double d = s.log_sum - mean * static_cast<double>(s.cycles);
      ss += d * d;
    }
    rep.contraction = -mean;
    rep.contraction_se = std::sqrt(ss * m / (m - 1.0)) / static_cast<double>(cycles);
  }

  const double c = rep.contraction, se = rep.contraction_se;
  const double escape_final = rep.escape_curve.back();
  rep.margin = std::max(c - cfg.theta_rec, cfg.theta_tr - c);
  if (cycles < cfg.min_crossings) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "too few scale crossings (" + std::to_string(cycles) + ")";
  } else if (c >= cfg.theta_rec && c - cfg.z_min * se > 0.0) {
    rep.verdict = Verdict::RecurrentLeaning;
    rep.reason = "overshoot contraction above theta_rec";
  } else if (c <= cfg.theta_tr && c + cfg.z_min * se < 0.0 &&
             escape_final >= cfg.escape_cap * cfg.radius) {
    rep.verdict = Verdict::TransientLeaning;
    rep.reason = "overshoot expansion below theta_tr and paths escape";
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = "deciding statistic inside the threshold band";
  }
  return rep;
}

SeparationReport separation_experiment(const ChainSpec& a, const ChainSpec& b,
                                       const ClassifierConfig& cfg) {
  SeparationReport rep;
  rep.a = classify(a, cfg);
  rep.b = classify(b, cfg);
  if (rep.b.late_return > 0.0) {
    rep.late_return_ratio = rep.a.late_return / rep.b.late_return;
  } else {
    rep.late_return_ratio = rep.a.late_return > 0.0 ? std::numeric_limits<double>::infinity()
                                                    : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

ScaleInvarianceReport scale_invariance_check(const ChainSpec& spec, double c,
                                             const ClassifierConfig& cfg) {
  if (!std::holds_alternative<StableKernel>(spec))
    throw PreconditionError("scale_invariance_check needs a stable kernel spec");
  return scale_invariance_check(spec, c, cfg, classify(spec, cfg));
}

ScaleInvarianceReport scale_invariance_check(const ChainSpec& spec, double c, const ClassifierConfig& cfg,
                                             const ClassifierReport& base) {
  const auto* k = std::get_if<StableKernel>(&spec);
  if (!k) throw PreconditionError("scale_invariance_check needs a stable kernel spec");
  if (!(c > 0.0)) throw PreconditionError("scale factor c must be > 0");
  ScaleInvarianceReport rep;
  rep.c = c;
  rep.base = base;
  rep.scaled = c == 1.0 ? rep.base : classify(make_stable_kernel(k->alpha, k->gamma.scaled(c)), cfg);
  rep.consistent = rep.base.verdict == rep.scaled.verdict ||
                   rep.base.verdict == Verdict::Inconclusive ||
                   rep.scaled.verdict == Verdict::Inconclusive;
  return rep;
}

}  // namespace stablelike
