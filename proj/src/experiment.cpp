#include "stablelike/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <variant>

#include "stablelike/discrete_cf.hpp"
#include "stablelike/errors.hpp"
#include "stablelike/limit_lab.hpp"
#include "stablelike/parallel.hpp"
#include "stablelike/recurrence_lab.hpp"
#include "stablelike/simulate.hpp"
#include "stablelike/stable_dist.hpp"
#include "stablelike/stats.hpp"

#ifndef STABLELIKE_BUILD_ID
#define STABLELIKE_BUILD_ID "unknown"
#endif

namespace stablelike {

std::string build_id() { return STABLELIKE_BUILD_ID; }

// --------------------------------------------------------------------- table

void Table::add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string Table::to_csv() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
    os << "\n";
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

// --------------------------------------------------------------------- plans

namespace {

std::string fd(double v) { return format_double(v); }

std::vector<long> to_longs(const std::vector<double>& v, const ConfigReader& r, const std::string& key) {
  std::vector<long> out;
  for (double d : v) {
    r.require(d >= 1.0 && d <= 1e9 && std::floor(d) == d, key, "entries must be integers in [1, 1e9]");
    out.push_back(static_cast<long>(d));
  }
  return out;
}

struct DistCheckPlan {
  StableParams params;
  std::size_t samples = 100000;
  std::vector<double> points;
  std::vector<double> tail_y;
  std::size_t hill_samples = 0;
  double hill_fraction = 0.01;
  QuadConfig quad;
};

struct GeneratorCheckPlan {
  SubordinationParams sub;
  std::vector<BumpFunction> bumps;
  std::vector<double> x;
  std::vector<double> h;
  std::size_t runs = 100000;
  int n_max = 8;
};

struct SimulatePlan {
  ChainSpec spec;
  std::string mode = "chain";  // chain, subordinate, scaled
  double x0 = 0.0;
  std::size_t steps = 1000;
  std::size_t paths = 1;
  SubordinationParams sub;
  double horizon = 1.0;
  double n = 1.0;
  bool export_csv = false;
  bool export_trace = false;
  std::size_t export_paths = 1;
  std::optional<GeneratorCheckPlan> generator;
  QuadConfig quad;
};

struct ClassifyPlan {
  ChainSpec spec;
  ClassifierConfig cfg;
};

struct SeparationPlan {
  ChainSpec a, b;
  ClassifierConfig cfg;
};

struct ScalePlan {
  ChainSpec spec;
  std::vector<double> factors;
  ClassifierConfig cfg;
};

struct CfTestPlan {
  double alpha = 1.0;
  long J = 1000;
  std::vector<double> eps_grid;
  QuadConfig quad;
  bool attraction = false;
  std::vector<long> n_list;
  std::size_t samples = 10000;
};

struct EmbeddedPlan {
  DiscretePowerLaw spec;
  long J = 500;
  double tol = 1e-6;
  std::vector<double> eps_grid;
  double margin = 0.1;
};

struct LimitPlan {
  ChainSpec spec;
  InvariantMeasureConfig im;
  int windings = 200;
  double plateau_tol = 1e-9;
  std::vector<double> n_list;
  std::vector<double> ks_n;
  double t = 1.0;
  std::size_t paths = 10000;
  double h0 = 0.9;
  TestFn g = TestFn::indicator(1.0);
};

struct InvariantPlan {
  ChainSpec spec;
  InvariantMeasureConfig im;
  int windings = 200;
  bool defect = true;
  double plateau_tol = 1e-9;
};

struct ValidatePlan {
  ChainSpec spec;
  std::vector<double> y_grid;
  std::vector<double> x_grid;
  ConditionTolerances tol;
  QuadConfig quad;
};

}  // namespace

struct Plan {
  std::variant<DistCheckPlan, SimulatePlan, ClassifyPlan, SeparationPlan, ScalePlan, CfTestPlan,
               EmbeddedPlan, LimitPlan, InvariantPlan, ValidatePlan>
      v;
};

namespace {

const Json& empty_object() {
  static const Json j = Json::object();
  return j;
}

ConfigReader sub_object(ConfigReader& r, const std::string& key) {
  if (r.has(key)) return r.object(key);
  return ConfigReader(empty_object(), r.pointer(key));
}

ChainSpec read_spec(ConfigReader& r, const std::string& key) {
  return spec_from_json(r.raw(key), r.pointer(key));
}

void need_kind(const ChainSpec& s, const ConfigReader& r, const std::string& key, bool ok,
               const std::string& what) {
  if (!ok) throw ConfigError(r.pointer(key) + "/kind", what + " (got " + kind_name(s) + ")");
}

QuadConfig read_quad(ConfigReader& r) {
  return r.has("quadrature") ? quad_from_json(r.raw("quadrature"), r.pointer("quadrature")) : QuadConfig{};
}

ClassifierConfig read_classifier(ConfigReader& r, std::uint64_t seed, int threads) {
  ClassifierConfig c;
  if (r.has("classifier")) c = classifier_from_json(r.raw("classifier"), r.pointer("classifier"));
  c.seed = seed;
  c.threads = threads;
  return c;
}

std::vector<double> read_eps(ConfigReader& p) {
  auto eps = p.numbers("eps_grid", default_eps_grid());
  p.require(eps.size() >= 4, "eps_grid", "eps_grid needs at least 4 points");
  for (double e : eps) p.require(e > 0.0 && e < 3.14159, "eps_grid", "eps_grid entries must lie in (0, pi)");
  return eps;
}

void read_im(ConfigReader& p, InvariantMeasureConfig& im, std::uint64_t seed) {
  im.n_steps = p.unsigned_int("steps", im.n_steps);
  im.bins = p.unsigned_int("bins", im.bins);
  im.burn_in = p.number("burn_in", im.burn_in);
  im.batches = p.unsigned_int("batches", im.batches);
  im.x0 = p.number("x0", im.x0);
  im.origin = p.number("origin", im.origin);
  im.seed = seed;
  p.require(im.n_steps >= 100 && im.n_steps <= 1000000000, "steps", "steps must lie in [100, 1e9]");
  p.require(im.bins >= 16 && im.bins <= 100000, "bins", "bins must lie in [16, 1e5]");
  p.require(im.burn_in >= 0.0 && im.burn_in < 1.0, "burn_in", "burn_in must lie in [0,1)");
  p.require(im.batches >= 2 && im.batches <= 10000, "batches", "batches must lie in [2, 1e4]");
  p.require(static_cast<double>(im.n_steps) * (1.0 - im.burn_in) >= static_cast<double>(im.batches), "steps",
            "steps after burn-in must cover the batch count");
}

Plan parse_plan(const std::string& kind, ConfigReader& r, std::uint64_t seed, int threads) {
  Plan plan;
  if (kind == "dist-check") {
    DistCheckPlan d;
    ConfigReader p = sub_object(r, "params");
    const double alpha = p.number("alpha"), gamma = p.number("gamma", 1.0);
    p.require(alpha > 0.0 && alpha <= 2.0, "alpha", "alpha must lie in (0,2]");
    p.require(gamma > 0.0, "gamma", "gamma must be > 0");
    d.params = StableParams::make(alpha, gamma);
    d.samples = p.unsigned_int("samples", d.samples);
    p.require(d.samples >= 10 && d.samples <= 100000000, "samples", "samples must lie in [10, 1e8]");
    d.points = p.numbers("points", {0.0, 0.5, 1.0, 2.0, 5.0, 10.0});
    d.tail_y = p.numbers("tail_y", alpha < 2.0 ? std::vector<double>{100.0} : std::vector<double>{});
    p.require(alpha < 2.0 || d.tail_y.empty(), "tail_y", "alpha = 2 has no power tail");
    for (double y : d.tail_y) p.require(y > 0.0, "tail_y", "tail_y entries must be > 0");
    d.hill_samples = p.unsigned_int("hill_samples", alpha < 2.0 ? 1000000 : 0);
    p.require(alpha < 2.0 || d.hill_samples == 0, "hill_samples", "alpha = 2 has no tail index");
    p.require(d.hill_samples == 0 || (d.hill_samples >= 1000 && d.hill_samples <= 100000000), "hill_samples",
              "hill_samples must be 0 or lie in [1e3, 1e8]");
    d.hill_fraction = p.number("hill_fraction", d.hill_fraction);
    p.require(d.hill_fraction > 0.0 && d.hill_fraction < 0.5, "hill_fraction", "hill_fraction must lie in (0, 0.5)");
    p.finish();
    d.quad = read_quad(r);
    plan.v = d;
  } else if (kind == "simulate") {
    SimulatePlan s;
    s.spec = read_spec(r, "spec");
    ConfigReader p = sub_object(r, "params");
    s.mode = p.string("mode", s.mode);
    p.require(s.mode == "chain" || s.mode == "subordinate" || s.mode == "scaled", "mode",
              "mode must be chain, subordinate or scaled");
    s.x0 = p.number("x0", 0.0);
    s.steps = p.unsigned_int("steps", s.steps);
    p.require(s.steps <= 100000000, "steps", "steps must be <= 1e8");
    s.paths = p.unsigned_int("paths", s.paths);
    p.require(s.paths >= 1 && s.paths <= 10000000, "paths", "paths must lie in [1, 1e7]");
    const double a = p.number("a", 1.0), kappa = p.number("kappa", 1.0);
    p.require(a != 0.0, "a", "a must be nonzero");
    p.require(kappa > 0.0, "kappa", "kappa must be > 0");
    s.sub = SubordinationParams::make(a, kappa);
    s.horizon = p.number("horizon", 1.0);
    p.require(s.horizon > 0.0 && s.horizon <= 1e8, "horizon", "horizon must lie in (0, 1e8]");
    s.n = p.number("n", 1.0);
    p.require(s.n >= 1.0 && s.n <= 1e8, "n", "n must lie in [1, 1e8]");
    if (s.mode == "scaled")
      need_kind(s.spec, r, "spec", std::holds_alternative<PeriodicPareto>(s.spec), "scaled mode needs a periodic_pareto spec");
    s.export_csv = p.boolean("export_csv", false);
    s.export_trace = p.boolean("export_trace", false);
    s.export_paths = p.unsigned_int("export_paths", 1);
    p.require(s.export_paths <= 1000, "export_paths", "export_paths must be <= 1000");
    if (p.has("generator_check")) {
      p.require(!is_discrete(s.spec), "generator_check", "generator check needs a continuous-state spec");
      ConfigReader g = p.object("generator_check");
      GeneratorCheckPlan gc;
      const double ga = g.number("a", 1.0), gk = g.number("kappa", 1.0);
      g.require(ga != 0.0, "a", "a must be nonzero");
      g.require(gk > 0.0, "kappa", "kappa must be > 0");
      gc.sub = SubordinationParams::make(ga, gk);
      if (g.has("bumps")) {
        const Json& arr = g.raw("bumps");
        g.require(arr.is_array() && !arr.empty(), "bumps", "bumps must be a non-empty array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
          ConfigReader b(arr[i], g.pointer("bumps") + "/" + std::to_string(i));
          BumpFunction f{b.number("center"), b.number("radius")};
          b.require(f.radius > 0.0, "radius", "radius must be > 0");
          b.finish();
          gc.bumps.push_back(f);
        }
      } else {
        gc.bumps = {BumpFunction{0.0, 2.0}, BumpFunction{3.0, 1.5}};
      }
      gc.x = g.numbers("x", {0.0, 3.0});
      gc.h = g.numbers("h", {0.1, 0.05, 0.025});
      g.require(!gc.x.empty(), "x", "x must be non-empty");
      g.require(!gc.h.empty(), "h", "h must be non-empty");
      for (double h : gc.h) g.require(h > 0.0 && h <= 1.0, "h", "h entries must lie in (0,1]");
      gc.runs = g.unsigned_int("runs", gc.runs);
      g.require(gc.runs >= 100 && gc.runs <= 100000000, "runs", "runs must lie in [100, 1e8]");
      const auto nmax = g.unsigned_int("n_max", 8);
      g.require(nmax >= 1 && nmax <= 64, "n_max", "n_max must lie in [1, 64]");
      gc.n_max = static_cast<int>(nmax);
      g.finish();
      s.generator = gc;
    }
    p.finish();
    s.quad = read_quad(r);
    plan.v = std::move(s);
  } else if (kind == "classify") {
    ClassifyPlan c{read_spec(r, "spec"), read_classifier(r, seed, threads)};
    plan.v = std::move(c);
  } else if (kind == "separation") {
    SeparationPlan s{read_spec(r, "spec_a"), read_spec(r, "spec_b"), read_classifier(r, seed, threads)};
    plan.v = std::move(s);
  } else if (kind == "scale-invariance") {
    ScalePlan s{read_spec(r, "spec"), {}, read_classifier(r, seed, threads)};
    need_kind(s.spec, r, "spec", std::holds_alternative<StableKernel>(s.spec), "scale-invariance needs a stable_kernel spec");
    ConfigReader p = sub_object(r, "params");
    s.factors = p.numbers("factors", {5.0, 0.2});
    p.require(!s.factors.empty(), "factors", "factors must be non-empty");
    for (double c : s.factors) p.require(c > 0.0, "factors", "factors must be > 0");
    p.finish();
    plan.v = std::move(s);
  } else if (kind == "cf-test") {
    CfTestPlan c;
    ConfigReader p = sub_object(r, "params");
    c.alpha = p.number("alpha");
    p.require(c.alpha > 0.0 && c.alpha < 2.0, "alpha", "alpha must lie in (0,2)");
    const auto J = p.unsigned_int("J", 1000);
    p.require(J >= 1 && J <= 10000000, "J", "J must lie in [1, 1e7]");
    c.J = static_cast<long>(J);
    c.eps_grid = read_eps(p);
    if (p.has("attraction")) {
      ConfigReader a = p.object("attraction");
      c.attraction = true;
      c.n_list = to_longs(a.numbers("n_list", {100.0, 1000.0, 10000.0}), a, "n_list");
      a.require(!c.n_list.empty(), "n_list", "n_list must be non-empty");
      c.samples = a.unsigned_int("samples", c.samples);
      a.require(c.samples >= 10 && c.samples <= 100000000, "samples", "samples must lie in [10, 1e8]");
      a.finish();
    }
    p.finish();
    c.quad = read_quad(r);
    plan.v = std::move(c);
  } else if (kind == "embedded") {
    ChainSpec spec = read_spec(r, "spec");
    need_kind(spec, r, "spec", is_discrete(spec), "embedded needs a discrete spec");
    EmbeddedPlan e;
    e.spec = std::get<DiscretePowerLaw>(spec);
    ConfigReader p = sub_object(r, "params");
    const auto J = p.unsigned_int("J", 500);
    p.require(J >= 1 && J <= 1000000, "J", "J must lie in [1, 1e6]");
    e.J = static_cast<long>(J);
    e.tol = p.number("tol", e.tol);
    p.require(e.tol > 0.0 && e.tol < 1.0, "tol", "tol must lie in (0,1)");
    e.eps_grid = read_eps(p);
    e.margin = p.number("margin", e.margin);
    p.require(e.margin >= 0.0 && e.margin < 1.0, "margin", "margin must lie in [0,1)");
    p.finish();
    plan.v = std::move(e);
  } else if (kind == "limit") {
    LimitPlan l;
    l.spec = read_spec(r, "spec");
    need_kind(l.spec, r, "spec", std::holds_alternative<PeriodicPareto>(l.spec), "limit needs a periodic_pareto spec");
    ConfigReader p = sub_object(r, "params");
    read_im(p, l.im, seed);
    l.im.origin = p.number("origin", l.im.origin);
    const auto w = p.unsigned_int("windings", 200);
    p.require(w >= 1 && w <= 100000, "windings", "windings must lie in [1, 1e5]");
    l.windings = static_cast<int>(w);
    l.plateau_tol = p.number("plateau_tol", l.plateau_tol);
    p.require(l.plateau_tol >= 0.0, "plateau_tol", "plateau_tol must be >= 0");
    l.n_list = p.numbers("n_list", {10.0, 100.0, 1000.0});
    l.ks_n = p.numbers("ks_n", {10.0, 1000.0});
    for (double n : l.n_list) p.require(n >= 1.0 && n <= 1e8, "n_list", "n_list entries must lie in [1, 1e8]");
    for (double n : l.ks_n) p.require(n >= 1.0 && n <= 1e8, "ks_n", "ks_n entries must lie in [1, 1e8]");
    l.t = p.number("t", 1.0);
    p.require(l.t > 0.0 && l.t <= 1e4, "t", "t must lie in (0, 1e4]");
    l.paths = p.unsigned_int("paths", l.paths);
    p.require(l.paths >= 2 && l.paths <= 100000000, "paths", "paths must lie in [2, 1e8]");
    l.h0 = p.number("h0", l.h0);
    p.require(l.h0 > 0.0, "h0", "h0 must be > 0");
    if (p.has("g")) {
      ConfigReader g = p.object("g");
      const std::string type = g.string("type", "indicator");
      const double level = g.number("level", 1.0);
      g.require(level > 0.0, "level", "test function level must be > 0");
      if (type == "indicator") l.g = TestFn::indicator(level);
      else if (type == "ramp") l.g = TestFn::ramp(level);
      else throw ConfigError(g.pointer("type"), "test function type must be indicator or ramp");
      g.finish();
    }
    p.finish();
    plan.v = std::move(l);
  } else if (kind == "invariant-measure") {
    InvariantPlan ip;
    ip.spec = read_spec(r, "spec");
    need_kind(ip.spec, r, "spec", std::holds_alternative<PeriodicPareto>(ip.spec),
              "invariant-measure needs a periodic_pareto spec");
    ConfigReader p = sub_object(r, "params");
    read_im(p, ip.im, seed);
    const auto w = p.unsigned_int("windings", 200);
    p.require(w >= 1 && w <= 100000, "windings", "windings must lie in [1, 1e5]");
    ip.windings = static_cast<int>(w);
    ip.defect = p.boolean("defect", true);
    ip.plateau_tol = p.number("plateau_tol", ip.plateau_tol);
    p.require(ip.plateau_tol >= 0.0, "plateau_tol", "plateau_tol must be >= 0");
    p.finish();
    plan.v = std::move(ip);
  } else if (kind == "validate-conditions") {
    ValidatePlan v;
    v.spec = read_spec(r, "spec");
    ConfigReader p = sub_object(r, "params");
    v.y_grid = p.numbers("y_grid", {1.0, 2.0, 5.0, 10.0, 100.0, 1000.0});
    std::vector<double> xd;
    if (auto* pp = std::get_if<PeriodicPareto>(&v.spec)) {
      for (int i = 0; i < 16; ++i) xd.push_back(pp->tau * i / 16.0);
    } else if (is_discrete(v.spec)) {
      for (int i = -4; i <= 4; ++i) xd.push_back(i);
    } else {
      for (int i = -8; i <= 8; ++i) xd.push_back(i);
    }
    v.x_grid = p.numbers("x_grid", xd);
    p.require(!v.y_grid.empty(), "y_grid", "y_grid must be non-empty");
    p.require(!v.x_grid.empty(), "x_grid", "x_grid must be non-empty");
    for (double y : v.y_grid) p.require(y > 0.0, "y_grid", "y_grid entries must be > 0");
    v.tol.pc3 = p.number("pc3_tol", v.tol.pc3);
    v.tol.normalization = p.number("normalization_tol", v.tol.normalization);
    p.require(v.tol.pc3 > 0.0, "pc3_tol", "pc3_tol must be > 0");
    p.require(v.tol.normalization > 0.0, "normalization_tol", "normalization_tol must be > 0");
    p.finish();
    v.quad = read_quad(r);
    plan.v = std::move(v);
  } else {
    throw ConfigError("/experiment", "unknown experiment kind '" + kind + "'");
  }
  return plan;
}

// ------------------------------------------------------------------- runners

struct Ctx {
  std::uint64_t seed;
  int threads;
  std::string export_dir;
};

using Result = Experiment::Result;

void classifier_rows(Result& res, const std::string& name, const ClassifierReport& rep) {
  if (res.summary.header.empty())
    res.summary.header = {"case", "verdict", "contraction", "contraction_se", "crossings", "late_return",
                          "occupation", "margin"};
  res.summary.add({name, verdict_name(rep.verdict), fd(rep.contraction), fd(rep.contraction_se),
                   std::to_string(rep.crossings), fd(rep.late_return), fd(rep.occupation), fd(rep.margin)});
  for (std::size_t i = 0; i < rep.escape_steps.size(); ++i)
    res.series.add({"escape:" + name, std::to_string(rep.escape_steps[i]), fd(rep.escape_curve[i])});
}

Result run_dist_check(const DistCheckPlan& d, const Ctx& ctx) {
  Result res;
  auto& out = res.report;
  out["alpha"] = d.params.alpha;
  out["gamma"] = d.params.gamma;
  res.summary.header = {"check", "value"};

  OrderedJson pts = OrderedJson::array();
  for (double y : d.points) {
    const double f = pdf(d.params, y, d.quad), F = cdf(d.params, y, d.quad);
    OrderedJson e;
    e["y"] = y;
    e["pdf"] = f;
    e["cdf"] = F;
    pts.push_back(e);
    res.series.add({"pdf", fd(y), fd(f)});
    res.series.add({"cdf", fd(y), fd(F)});
    res.summary.add({"pdf(" + fd(y) + ")", fd(f)});
  }
  out["points"] = pts;

  const StableCdfTable table(d.params, 600, d.quad);
  double table_err = 0.0;
  for (const auto& e : pts) table_err = std::max(table_err, std::abs(table(e["y"].get<double>()) - e["cdf"].get<double>()));
  out["cdf_table_max_error"] = table_err;

  // Samples in fixed chunks so the draw is independent of the worker count.
  const RandomStream master(ctx.seed);
  auto draw = [&](std::size_t n, std::uint64_t stream) {
    constexpr std::size_t chunk = 4096;
    std::vector<double> xs(n);
    const StableSampler sampler(d.params);
    const RandomStream base = master.split(stream);
    parallel_for((n + chunk - 1) / chunk, ctx.threads, [&](std::size_t c) {
      RandomStream rng = base.split(c);
      for (std::size_t i = c * chunk; i < std::min(n, (c + 1) * chunk); ++i) xs[i] = sampler(rng);
    });
    return xs;
  };
  const double ks = ks_statistic(draw(d.samples, 0), [&](double y) { return table(y); });
  out["samples"] = d.samples;
  out["ks"] = ks;
  res.summary.add({"ks", fd(ks)});

  if (d.hill_samples > 0) {
    const auto k = static_cast<std::size_t>(std::max(10.0, d.hill_fraction * static_cast<double>(d.hill_samples)));
    const double hill = hill_estimate(draw(d.hill_samples, 1), k);
    OrderedJson h;
    h["samples"] = d.hill_samples;
    h["k"] = k;
    h["estimate"] = hill;
    out["hill"] = h;
    res.summary.add({"hill", fd(hill)});
  }
  if (!d.tail_y.empty()) {
    const double c = tail_constant(d.params);
    out["tail_constant"] = c;
    OrderedJson tail = OrderedJson::array();
    for (double y : d.tail_y) {
      const double ratio = pdf(d.params, y, d.quad) * std::pow(y, d.params.alpha + 1.0) / c;
      OrderedJson e;
      e["y"] = y;
      e["ratio"] = ratio;
      tail.push_back(e);
      res.summary.add({"tail_ratio(" + fd(y) + ")", fd(ratio)});
    }
    out["tail_ratio"] = tail;
  }
  return res;
}

Result run_simulate(const SimulatePlan& s, const Ctx& ctx) {
  Result res;
  auto& out = res.report;
  out["spec"] = spec_to_json(s.spec);
  out["mode"] = s.mode;
  const RandomStream master(ctx.seed);
  const std::size_t keep = (s.export_csv || s.export_trace) && !ctx.export_dir.empty()
                               ? std::min(s.export_paths, s.paths)
                               : 0;
  std::vector<double> final_state(s.paths), max_abs(s.paths), jumps(s.paths, 0.0);
  std::vector<PathDiscrete> kept_d(keep);
  std::vector<PathCT> kept_ct(keep);
  parallel_for(s.paths, ctx.threads, [&](std::size_t i) {
    RandomStream rng = master.split(i);
    const std::vector<double>* states = nullptr;
    PathDiscrete pd;
    PathCT pc;
    if (s.mode == "chain") {
      pd = run_chain(s.spec, s.x0, s.steps, rng);
      states = &pd.states;
    } else {
      pc = s.mode == "subordinate" ? subordinate(s.spec, s.x0, s.sub, s.horizon, rng)
                                   : scaled_periodic_path(s.spec, s.x0, s.n, s.horizon, rng).path;
      states = &pc.states;
      jumps[i] = static_cast<double>(pc.jump_times.size());
    }
    final_state[i] = states->back();
    double m = 0.0;
    for (double v : *states) m = std::max(m, std::abs(v));
    max_abs[i] = m;
    if (i < keep) {
      kept_d[i] = std::move(pd);
      kept_ct[i] = std::move(pc);
    }
  });
  out["paths"] = s.paths;
  out["final_state"] = final_state;
  out["max_abs"] = max_abs;
  res.summary.header = {"sub_experiment", "quantity", "value"};
  res.summary.add({"paths", "median_final_abs", fd(median([&] {
                     std::vector<double> a;
                     for (double v : final_state) a.push_back(std::abs(v));
                     return a;
                   }()))});
  res.summary.add({"paths", "median_max_abs", fd(median(max_abs))});
  if (s.mode != "chain") {
    const MeanSe js = mean_se(jumps);
    out["jump_count_mean"] = js.mean;
    out["jump_count_se"] = js.se;
    res.summary.add({"paths", "jump_count_mean", fd(js.mean)});
  }
  for (std::size_t i = 0; i < keep; ++i) {
    const std::string stem = ctx.export_dir + "/path_" + std::to_string(i);
    if (s.mode == "chain") {
      if (s.export_csv) write_csv(kept_d[i], stem + ".csv");
      if (s.export_trace) write_trace(kept_d[i], stem + ".trace");
    } else {
      if (s.export_csv) write_csv(kept_ct[i], stem + ".csv");
      if (s.export_trace) write_trace(kept_ct[i], stem + ".trace");
    }
  }
  if (keep > 0) out["exported_paths"] = keep;

  if (s.generator) {
    const auto& g = *s.generator;
    OrderedJson checks = OrderedJson::array();
    for (std::size_t b = 0; b < g.bumps.size(); ++b) {
      for (std::size_t xi = 0; xi < g.x.size(); ++xi) {
        const double x = g.x[xi];
        const double A = generator_apply(s.spec, g.sub, g.bumps[b], x, s.quad);
        const auto q = semigroup_difference_quotients(s.spec, g.sub, g.bumps[b], x, g.h, g.runs,
                                                      master.split(1000000 + 1000 * b + xi), g.n_max);
        std::vector<double> err, lh, le;
        for (std::size_t k = 0; k < q.size(); ++k) {
          err.push_back(std::abs(q[k] - A));
          lh.push_back(std::log(g.h[k]));
          le.push_back(std::log(std::max(err.back(), 1e-300)));
        }
        // Ordered by decreasing h.
        std::vector<std::size_t> order(g.h.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](auto u, auto v) { return g.h[u] > g.h[v]; });
        bool decreasing = true;
        for (std::size_t k = 1; k < order.size(); ++k)
          if (!(err[order[k]] < err[order[k - 1]])) decreasing = false;
        OrderedJson c;
        c["bump_center"] = g.bumps[b].center;
        c["bump_radius"] = g.bumps[b].radius;
        c["x"] = x;
        c["generator"] = A;
        c["h"] = g.h;
        c["quotients"] = q;
        c["errors"] = err;
        c["decreasing"] = decreasing;
        if (g.h.size() >= 2) c["log_slope"] = linear_fit(lh, le).slope;
        checks.push_back(c);
        const std::string name = "bump" + std::to_string(b) + "@x=" + fd(x);
        res.summary.add({"generator:" + name, "decreasing", decreasing ? "true" : "false"});
        for (std::size_t k = 0; k < q.size(); ++k) res.series.add({"generator_error:" + name, fd(g.h[k]), fd(err[k])});
      }
    }
    OrderedJson gj;
    gj["a"] = g.sub.a;
    gj["kappa"] = g.sub.kappa;
    gj["runs"] = g.runs;
    gj["n_max"] = g.n_max;
    gj["checks"] = checks;
    out["generator_check"] = gj;
  }
  return res;
}

Result run_classify(const ClassifyPlan& c) {
  Result res;
  const auto rep = classify(c.spec, c.cfg);
  res.report["spec"] = spec_to_json(c.spec);
  res.report["classifier"] = classifier_to_json(c.cfg);
  res.report["result"] = classifier_report_to_json(rep);
  classifier_rows(res, "spec", rep);
  return res;
}

Result run_separation(const SeparationPlan& s) {
  Result res;
  const auto rep = separation_experiment(s.a, s.b, s.cfg);
  res.report["spec_a"] = spec_to_json(s.a);
  res.report["spec_b"] = spec_to_json(s.b);
  res.report["classifier"] = classifier_to_json(s.cfg);
  res.report["a"] = classifier_report_to_json(rep.a);
  res.report["b"] = classifier_report_to_json(rep.b);
  res.report["late_return_ratio"] = rep.late_return_ratio;
  classifier_rows(res, "a", rep.a);
  classifier_rows(res, "b", rep.b);
  return res;
}

Result run_scale(const ScalePlan& s) {
  Result res;
  res.report["spec"] = spec_to_json(s.spec);
  res.report["classifier"] = classifier_to_json(s.cfg);
  const auto base = classify(s.spec, s.cfg);
  res.report["base"] = classifier_report_to_json(base);
  classifier_rows(res, "base", base);
  OrderedJson runs = OrderedJson::array();
  bool all = true;
  for (double c : s.factors) {
    const auto rep = scale_invariance_check(s.spec, c, s.cfg, base);
    OrderedJson e;
    e["c"] = c;
    e["scaled"] = classifier_report_to_json(rep.scaled);
    e["consistent"] = rep.consistent;
    runs.push_back(e);
    all = all && rep.consistent;
    classifier_rows(res, "c=" + fd(c), rep.scaled);
  }
  res.report["scaled"] = runs;
  res.report["consistent"] = all;
  return res;
}

OrderedJson profile_json(const ChungFuchsProfile& p) {
  OrderedJson j;
  j["eps"] = p.eps;
  j["integral"] = p.integral;
  j["integral_error"] = p.integral_error;
  j["local_exponent"] = p.local_exponent;
  j["exponent_residual"] = p.exponent_residual;
  j["fit_lo"] = p.fit_lo;
  j["fit_hi"] = p.fit_hi;
  j["residual_bounded"] = p.residual_bounded;
  j["residual_log"] = p.residual_log;
  j["residual_power"] = p.residual_power;
  j["model"] = model_name(p.model);
  j["diverging"] = p.diverging;
  return j;
}

Result run_cf_test(const CfTestPlan& c, const Ctx& ctx) {
  Result res;
  const Pmf pmf = make_discrete_pmf(c.alpha, c.J);
  const auto prof = chung_fuchs_profile(pmf, c.eps_grid, c.quad);
  res.report["alpha"] = c.alpha;
  res.report["J"] = c.J;
  res.report["tail_kappa"] = pmf.tail_kappa();
  res.report["profile"] = profile_json(prof);
  res.summary.header = {"sub_experiment", "quantity", "value"};
  res.summary.add({"chung_fuchs", "local_exponent", fd(prof.local_exponent)});
  res.summary.add({"chung_fuchs", "model", model_name(prof.model)});
  for (std::size_t i = 0; i < prof.eps.size(); ++i)
    res.series.add({"chung_fuchs_integral", fd(prof.eps[i]), fd(prof.integral[i])});
  if (c.attraction) {
    const auto att = attraction_check(pmf, c.alpha, c.n_list, c.samples, ctx.seed, ctx.threads);
    OrderedJson a;
    a["n_list"] = att.n_list;
    a["samples"] = c.samples;
    a["ks"] = att.ks;
    a["tail_gamma"] = att.limit_gamma;
    a["fitted_gamma"] = att.fitted_gamma;
    a["non_increasing"] = att.non_increasing;
    res.report["attraction"] = a;
    for (std::size_t i = 0; i < att.ks.size(); ++i) {
      res.summary.add({"attraction n=" + std::to_string(att.n_list[i]), "ks", fd(att.ks[i])});
      res.series.add({"attraction_ks", std::to_string(att.n_list[i]), fd(att.ks[i])});
    }
  }
  return res;
}

Result run_embedded(const EmbeddedPlan& e) {
  Result res;
  const auto cls = classify_discrete(e.spec, e.J, e.tol, e.eps_grid, e.margin);
  res.report["spec"] = spec_to_json(ChainSpec(e.spec));
  res.report["verdict"] = verdict_name(cls.verdict);
  res.report["route"] = cls.route;
  res.report["margin"] = cls.margin;
  res.report["reason"] = cls.reason;
  res.report["profile"] = profile_json(cls.profile);
  res.summary.header = {"sub_experiment", "quantity", "value"};
  res.summary.add({"classification", "verdict", verdict_name(cls.verdict)});
  res.summary.add({"classification", "local_exponent", fd(cls.profile.local_exponent)});
  if (cls.has_embedded) {
    const auto& w = cls.embedded;
    OrderedJson j;
    j["parity"] = w.parity;
    j["J"] = w.J;
    j["J_work"] = w.J_work;
    j["k_max"] = w.k_max;
    j["C"] = w.C;
    j["C_kmax"] = w.C_kmax;
    j["remaining"] = w.remaining;
    j["escaped"] = w.escaped;
    j["return_bound"] = w.return_bound;
    j["deficit"] = w.deficit;
    j["error_bound"] = w.error_bound;
    j["tail_mass"] = w.tail_mass;
    j["tol"] = e.tol;
    j["bound_honored"] = w.deficit <= w.error_bound && w.error_bound <= e.tol;
    // Direct one-step jumps are one term of the embedded law, so they bound it below.
    const Pmf& direct = e.spec.pmfs[static_cast<std::size_t>(w.parity)];
    double worst = std::numeric_limits<double>::infinity();
    long worst_i = 0;
    for (long i = 1; i <= w.J; ++i) {
      const double gap = w.jump_pmf.prob(i) - direct.prob(2 * i);
      if (gap < worst) {
        worst = gap;
        worst_i = i;
      }
    }
    j["lower_bound_min_gap"] = worst;
    j["lower_bound_worst_i"] = worst_i;
    j["lower_bound_ok"] = worst >= 0.0;
    res.report["embedded"] = j;
    res.summary.add({"embedded", "deficit", fd(w.deficit)});
    res.summary.add({"embedded", "error_bound", fd(w.error_bound)});
    res.summary.add({"embedded", "lower_bound_ok", worst >= 0.0 ? "true" : "false"});
    for (long i = 1; i <= std::min<long>(w.J, 200); ++i)
      res.series.add({"embedded_pmf", std::to_string(i), fd(w.jump_pmf.prob(i))});
  }
  for (std::size_t i = 0; i < cls.profile.eps.size(); ++i)
    res.series.add({"chung_fuchs_integral", fd(cls.profile.eps[i]), fd(cls.profile.integral[i])});
  return res;
}

OrderedJson histogram_json(const TorusHistogram& h) {
  OrderedJson j;
  j["tau"] = h.tau;
  j["origin"] = h.origin;
  j["bins"] = h.bins;
  j["sample_size"] = h.sample_size;
  j["weights"] = h.weights;
  j["se"] = h.se;
  return j;
}

OrderedJson theta_json(const ThetaEstimate& t) {
  OrderedJson j;
  j["value"] = t.value;
  j["alpha0"] = t.alpha0;
  j["plateau_tol"] = t.plateau_tol;
  j["plateau_declared"] = t.plateau_declared;
  j["warning"] = t.warning;
  return j;
}

Result run_limit(const LimitPlan& l, const Ctx& ctx) {
  Result res;
  res.report["spec"] = spec_to_json(l.spec);
  const auto hist = invariant_measure(l.spec, l.im);
  const double defect = stationarity_defect(l.spec, hist, l.windings);
  const auto th = theta(l.spec, hist, l.plateau_tol);
  res.report["histogram"] = histogram_json(hist);
  res.report["stationarity_defect"] = defect;
  res.report["theta"] = theta_json(th);
  res.summary.header = {"sub_experiment", "quantity", "value"};
  res.summary.add({"invariant_measure", "stationarity_defect", fd(defect)});
  res.summary.add({"invariant_measure", "theta", fd(th.value)});
  for (std::size_t b = 0; b < hist.bins; ++b) res.series.add({"pi_hat", fd(hist.midpoint(b)), fd(hist.weights[b])});

  const TruncationFn h(l.h0);
  const auto lim = limiting_characteristics(th, h, l.g, l.t);
  OrderedJson limj;
  limj["B"] = lim.B;
  limj["Ctilde"] = lim.Ctilde;
  limj["nu_g"] = lim.nu_g;
  limj["t"] = l.t;
  limj["g"] = {{"type", l.g.kind == TestFn::Kind::Indicator ? "indicator" : "ramp"}, {"level", l.g.level}};
  limj["h0"] = l.h0;
  res.report["limit_characteristics"] = limj;

  OrderedJson chars = OrderedJson::array();
  for (std::size_t i = 0; i < l.n_list.size(); ++i) {
    const double n = l.n_list[i];
    const auto emp = empirical_characteristics(l.spec, n, l.t, h, l.g, l.paths, derive_seed(ctx.seed, 100 + i),
                                               ctx.threads);
    const double rel = lim.nu_g != 0.0 ? (emp.nu_g - lim.nu_g) / lim.nu_g : std::nan("");
    OrderedJson e;
    e["n"] = n;
    e["B"] = emp.B;
    e["Ctilde"] = emp.Ctilde;
    e["nu_g"] = emp.nu_g;
    e["nu_g_se"] = emp.nu_g_se;
    e["nu_g_rel_error"] = rel;
    chars.push_back(e);
    const std::string name = "n=" + fd(n);
    res.summary.add({name, "nu_g_rel_error", fd(rel)});
    res.summary.add({name, "B", fd(emp.B)});
    res.series.add({"nu_g", fd(n), fd(emp.nu_g)});
  }
  res.report["characteristics"] = chars;

  OrderedJson ks = OrderedJson::array();
  for (std::size_t i = 0; i < l.ks_n.size(); ++i) {
    const auto m = marginal_ks(l.spec, l.ks_n[i], l.t, l.paths, th.value, derive_seed(ctx.seed, 200 + i), ctx.threads);
    OrderedJson e;
    e["n"] = l.ks_n[i];
    e["ks"] = m.ks;
    e["gamma_eff"] = m.gamma_eff;
    e["alpha0"] = m.alpha0;
    ks.push_back(e);
    res.summary.add({"n=" + fd(l.ks_n[i]), "marginal_ks", fd(m.ks)});
    res.series.add({"marginal_ks", fd(l.ks_n[i]), fd(m.ks)});
  }
  res.report["marginal_ks"] = ks;
  return res;
}

Result run_invariant(const InvariantPlan& ip) {
  Result res;
  res.report["spec"] = spec_to_json(ip.spec);
  const auto hist = invariant_measure(ip.spec, ip.im);
  res.report["histogram"] = histogram_json(hist);
  res.summary.header = {"sub_experiment", "quantity", "value"};
  for (std::size_t b = 0; b < hist.bins; ++b) res.series.add({"pi_hat", fd(hist.midpoint(b)), fd(hist.weights[b])});
  if (ip.defect) {
    const double d = stationarity_defect(ip.spec, hist, ip.windings);
    res.report["stationarity_defect"] = d;
    res.summary.add({"invariant_measure", "stationarity_defect", fd(d)});
  }
  const auto& pp = std::get<PeriodicPareto>(ip.spec);
  if (pp.alpha.kind() == ProfileKind::Constant) {
    // Constant index: the projected chain is a random walk on the circle, so pi is uniform.
    const double u = 1.0 / static_cast<double>(hist.bins);
    double worst = 0.0;
    for (std::size_t b = 0; b < hist.bins; ++b)
      worst = std::max(worst, hist.se[b] > 0.0 ? std::abs(hist.weights[b] - u) / hist.se[b]
                                               : std::numeric_limits<double>::infinity());
    OrderedJson j;
    j["max_abs_z"] = worst;
    j["within_3se"] = worst <= 3.0;
    res.report["uniform_check"] = j;
    res.summary.add({"uniform_check", "max_abs_z", fd(worst)});
  } else if (pp.alpha.period()) {
    const auto th = theta(ip.spec, hist, ip.plateau_tol);
    res.report["theta"] = theta_json(th);
    res.summary.add({"invariant_measure", "theta", fd(th.value)});
  }
  return res;
}

Result run_validate(const ValidatePlan& v) {
  Result res;
  const auto rep = check_conditions(v.spec, v.y_grid, v.x_grid, v.tol, v.quad);
  res.report["spec"] = spec_to_json(v.spec);
  res.report["x_grid"] = v.x_grid;
  res.report["y_grid"] = rep.y_grid;
  res.report["sup_deviation"] = rep.sup_deviation;
  res.report["lemma_bound"] = rep.lemma_bound;
  double beyond = 0.0;
  for (std::size_t i = 0; i < rep.y_grid.size(); ++i)
    if (std::abs(rep.y_grid[i]) >= 1.0) beyond = std::max(beyond, rep.sup_deviation[i]);
  res.report["max_deviation_beyond_1"] = beyond;
  res.report["inf_c"] = rep.inf_c;
  res.report["b_grid"] = rep.b_grid;
  res.report["sup_tail_mass"] = rep.sup_tail_mass;
  res.report["normalization_error"] = rep.normalization_error;
  res.report["violations"] = rep.violations;
  res.report["ok"] = rep.ok();
  res.summary.header = {"y", "sup_deviation", "lemma_bound"};
  for (std::size_t i = 0; i < rep.y_grid.size(); ++i) {
    res.summary.add({fd(rep.y_grid[i]), fd(rep.sup_deviation[i]), fd(rep.lemma_bound[i])});
    res.series.add({"sup_deviation", fd(rep.y_grid[i]), fd(rep.sup_deviation[i])});
  }
  return res;
}

}  // namespace

// ---------------------------------------------------------------- experiment

Experiment::Experiment(const Json& document, const Overrides& ov) {
  ConfigReader r(document, "");
  const auto version = r.unsigned_int("schema_version");
  r.require(version == static_cast<std::uint64_t>(kSchemaVersion), "schema_version",
            "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  kind_ = r.string("experiment");
  seed_ = ov.seed ? *ov.seed : r.unsigned_int("seed", 1);
  if (ov.seed) r.unsigned_int("seed", 1);
  const auto threads = ov.threads ? static_cast<std::uint64_t>(std::max(*ov.threads, 0)) : r.unsigned_int("threads", 1);
  if (ov.threads) r.unsigned_int("threads", 1);
  if (threads < 1 || threads > 1024) throw ConfigError(ov.threads ? "--threads" : "/threads", "threads must lie in [1, 1024]");
  threads_ = static_cast<int>(threads);
  output_dir_ = ov.output_dir ? *ov.output_dir : r.string("output_dir", "out/" + kind_);
  if (ov.output_dir) r.string("output_dir", "");
  if (output_dir_.empty()) throw ConfigError("/output_dir", "output directory must be non-empty");
  plan_ = std::make_unique<Plan>(parse_plan(kind_, r, seed_, threads_));
  r.finish();

  canonical_ = document;
  canonical_["seed"] = seed_;
  canonical_.erase("threads");
  canonical_.erase("output_dir");
}

Experiment::~Experiment() = default;
Experiment::Experiment(Experiment&&) noexcept = default;
Experiment& Experiment::operator=(Experiment&&) noexcept = default;

std::string Experiment::config_hash() const { return fnv1a_hex(canonical_.dump()); }

Experiment::Result Experiment::run(const std::string& export_dir) const {
  const Ctx ctx{seed_, threads_, export_dir};
  Result inner = std::visit(
      [&](const auto& p) -> Result {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DistCheckPlan>) return run_dist_check(p, ctx);
        else if constexpr (std::is_same_v<T, SimulatePlan>) return run_simulate(p, ctx);
        else if constexpr (std::is_same_v<T, ClassifyPlan>) return run_classify(p);
        else if constexpr (std::is_same_v<T, SeparationPlan>) return run_separation(p);
        else if constexpr (std::is_same_v<T, ScalePlan>) return run_scale(p);
        else if constexpr (std::is_same_v<T, CfTestPlan>) return run_cf_test(p, ctx);
        else if constexpr (std::is_same_v<T, EmbeddedPlan>) return run_embedded(p);
        else if constexpr (std::is_same_v<T, LimitPlan>) return run_limit(p, ctx);
        else if constexpr (std::is_same_v<T, InvariantPlan>) return run_invariant(p);
        else return run_validate(p);
      },
      plan_->v);
  Result res;
  res.report["schema_version"] = kSchemaVersion;
  res.report["experiment"] = kind_;
  res.report["build_id"] = build_id();
  res.report["config_hash"] = config_hash();
  res.report["seed"] = seed_;
  res.report["config"] = OrderedJson::parse(canonical_.dump());
  res.report["results"] = std::move(inner.report);
  res.summary = std::move(inner.summary);
  res.series = std::move(inner.series);
  res.series.header = {"series", "x", "y"};
  return res;
}

// ------------------------------------------------------------------- outputs

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << text;
  if (!os) throw Error("write failed: " + path);
}

std::string plot_script(const std::string& kind) {
  std::string s =
      "#!/usr/bin/env python3\n"
      "# Plots series.csv next to this script: one line per series.\n"
      "import csv\n"
      "import math\n"
      "import os\n"
      "import sys\n"
      "from collections import OrderedDict\n"
      "\n"
      "import matplotlib\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "here = os.path.dirname(os.path.abspath(__file__))\n"
      "series = OrderedDict()\n"
      "with open(os.path.join(here, \"series.csv\")) as fh:\n"
      "    for row in csv.DictReader(fh):\n"
      "        series.setdefault(row[\"series\"], ([], []))\n"
      "        series[row[\"series\"]][0].append(float(row[\"x\"]))\n"
      "        series[row[\"series\"]][1].append(float(row[\"y\"]))\n"
      "if not series:\n"
      "    sys.exit(\"series.csv is empty\")\n"
      "groups = OrderedDict()\n"
      "for name in series:\n"
      "    groups.setdefault(name.split(\":\")[0], []).append(name)\n"
      "fig, axes = plt.subplots(len(groups), 1, figsize=(7, 3.2 * len(groups)), squeeze=False)\n"
      "for ax, (group, names) in zip(axes[:, 0], groups.items()):\n"
      "    for name in names:\n"
      "        xs, ys = series[name]\n"
      "        ax.plot(xs, ys, marker=\".\", label=name)\n"
      "    xs = [x for n in names for x in series[n][0]]\n"
      "    ys = [y for n in names for y in series[n][1]]\n"
      "    if min(xs) > 0 and max(xs) / min(xs) > 100:\n"
      "        ax.set_xscale(\"log\")\n"
      "    if min(ys) > 0 and max(ys) / min(ys) > 100:\n"
      "        ax.set_yscale(\"log\")\n"
      "    ax.set_title(group)\n"
      "    ax.legend(fontsize=\"small\")\n"
      "fig.suptitle(\"";
  s += kind;
  s +=
      "\")\n"
      "fig.tight_layout()\n"
      "fig.savefig(os.path.join(here, \"plot.png\"), dpi=120)\n";
  return s;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_outputs(const Experiment& exp, const Experiment::Result& result, const std::string& dir,
                   const std::string& started_utc, const std::string& finished_utc, double wall_seconds,
                   const std::string& config_path) {
  std::filesystem::create_directories(dir);
  write_file(dir + "/report.json", result.report.dump(2) + "\n");
  write_file(dir + "/summary.csv", result.summary.to_csv());
  write_file(dir + "/series.csv", result.series.to_csv());
  write_file(dir + "/plot.py", plot_script(exp.kind()));
  OrderedJson meta;
  meta["started_utc"] = started_utc;
  meta["finished_utc"] = finished_utc;
  meta["wall_seconds"] = wall_seconds;
  meta["threads"] = exp.threads();
  meta["build_id"] = build_id();
  meta["config_hash"] = exp.config_hash();
  meta["config_path"] = config_path;
  meta["output_dir"] = dir;
  write_file(dir + "/metadata.json", meta.dump(2) + "\n");
}

RunOutcome outcome_from_current_exception() {
  RunOutcome out;
  OrderedJson e;
  try {
    throw;
  } catch (const ConfigError& x) {
    out.exit_code = 2;
    e["error"] = "ConfigError";
    e["pointer"] = x.pointer();
    e["message"] = x.what();
  } catch (const NumericalError& x) {
    out.exit_code = 3;
    e["error"] = "NumericalError";
    e["message"] = x.what();
    e["residual"] = x.residual();
  } catch (const PreconditionError& x) {
    out.exit_code = 4;
    e["error"] = "PreconditionError";
    e["message"] = x.what();
  } catch (const std::exception& x) {
    out.exit_code = 1;
    e["error"] = "Error";
    e["message"] = x.what();
  } catch (...) {
    out.exit_code = 1;
    e["error"] = "Error";
    e["message"] = "unknown exception";
  }
  e["exit_code"] = out.exit_code;
  out.error_json = e.dump();
  return out;
}

RunOutcome run_config_text(const std::string& text, const Overrides& overrides, const std::string& config_path) {
  try {
    Json doc;
    try {
      doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
    }
    const Experiment exp(doc, overrides);
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(exp.output_dir());
    const auto result = exp.run(exp.output_dir());
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(exp, result, exp.output_dir(), started, utc_now(), wall, config_path);
    RunOutcome out;
    out.output_dir = exp.output_dir();
    out.report_json = result.report.dump(2) + "\n";
    return out;
  } catch (...) {
    return outcome_from_current_exception();
  }
}

RunOutcome run_config_file(const std::string& path, const Overrides& overrides) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    RunOutcome out;
    out.exit_code = 2;
    OrderedJson e;
    e["error"] = "ConfigError";
    e["pointer"] = "";
    e["message"] = "cannot read config file " + path;
    e["exit_code"] = 2;
    out.error_json = e.dump();
    return out;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return run_config_text(ss.str(), overrides, path);
}

}  // namespace stablelike
