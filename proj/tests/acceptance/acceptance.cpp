// Acceptance suite: one PASS/FAIL line per criterion 1-12.
// Every experiment runs twice (threads 1 and 2) and report.json must match byte for byte.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "stablelike/config.hpp"
#include "stablelike/experiment.hpp"
#include "stablelike/random.hpp"
#include "stablelike/stable_dist.hpp"

namespace fs = std::filesystem;
using stablelike::Json;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------- oracles

// Standard SaS (cf exp(-|t|^a)) CDF from the Zolotarev/Nolan single-integral form.
double oracle_cdf(double alpha, double x, double tol = 1e-13, unsigned depth = 20) {
  if (alpha == 2.0) return 0.5 * std::erfc(-x / 2.0);
  if (alpha == 1.0) return 0.5 + std::atan(x) / kPi;
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - oracle_cdf(alpha, -x, tol, depth);
  const double e = alpha / (alpha - 1.0);
  const double xe = std::pow(x, e);
  // Kronrod nodes are interior, so the endpoint singularities are never evaluated.
  auto f = [&](double th) {
    const double v = std::pow(std::cos(th) / std::sin(alpha * th), e) * std::cos((alpha - 1.0) * th) / std::cos(th);
    return std::exp(-xe * v);
  };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, kPi / 2, depth, tol);
  return alpha > 1.0 ? 1.0 - integral / kPi : 0.5 + integral / kPi;
}

// Convergent large-x series of the SaS density for alpha < 1.
double oracle_pdf_series(double alpha, double x) {
  double s = 0.0;
  for (int k = 1; k <= 60; ++k) {
    const double lg = std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0) - (k * alpha + 1.0) * std::log(x);
    s += (k % 2 ? 1.0 : -1.0) * std::exp(lg) * std::sin(k * kPi * alpha / 2.0);
  }
  return s / kPi;
}

double oracle_tail_constant(double alpha) {
  return boost::math::tgamma(alpha + 1.0) * std::sin(kPi * alpha / 2.0) / kPi;
}

// Normalizing constant of the symmetric Pareto-type jump law (flat on |y|<1, c|y|^{-a-1} beyond).
double oracle_pareto_scale(double alpha) { return alpha / (2.0 * (alpha + 1.0)); }

double ks_against(std::vector<double> xs, const std::function<double(double)>& F) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = F(xs[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

// ---------------------------------------------------------------- harness

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Runner {
  fs::path root;
  std::vector<std::string> runs;
  std::vector<std::string> mismatches;

  struct Output {
    Json results;
    double seconds = 0.0;
  };

  Output run(const std::string& name, Json config) {
    config["schema_version"] = stablelike::kSchemaVersion;
    const std::string text = config.dump();
    Output out;
    std::string first;
    for (int pass = 0; pass < 2; ++pass) {
      stablelike::Overrides ov;
      ov.threads = pass + 1;
      ov.output_dir = (root / name / (pass == 0 ? "first" : "second")).string();
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = stablelike::run_config_text(text, ov);
      const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (res.exit_code != 0) throw std::runtime_error(name + " exited " + std::to_string(res.exit_code) + ": " + res.error_json);
      const std::string bytes = slurp(fs::path(res.output_dir) / "report.json");
      if (pass == 0) {
        first = bytes;
        out.seconds = dt;
        out.results = Json::parse(bytes).at("results");
      } else if (bytes != first) {
        mismatches.push_back(name);
      }
    }
    runs.push_back(name);
    return out;
  }
};

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "" : "!! ") + what);
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Json spec_sas(double alpha, double gamma = 1.0) {
  return {{"kind", "stable_kernel"}, {"alpha", alpha}, {"gamma", gamma}};
}

Json spec_step(const std::string& kind, double a, double b) {
  Json j = {{"kind", kind}, {"alpha", a}, {"beta", b}, {"gamma", 1.0}, {"delta", 1.0}};
  if (kind == "smoothed_step") j["k"] = 5.0;
  return j;
}

Json periodic_profile(double base, double peak) {
  return {{"type", "periodic_plateau"}, {"tau", 2.0}, {"base", base}, {"peak", peak},
          {"plateau_fraction", 0.5}, {"ramp_fraction", 0.1}};
}

Json spec_periodic(double base, double peak) {
  return {{"kind", "periodic_pareto"}, {"tau", 2.0}, {"alpha", periodic_profile(base, peak)}};
}

// Frozen classifier configuration used by every separation run.
const Json kClassifier = {{"horizon", 100000}, {"n_paths", 200}, {"radius", 10}};

Json separation(const Json& a, const Json& b, std::uint64_t seed) {
  return {{"experiment", "separation"}, {"seed", seed}, {"spec_a", a}, {"spec_b", b}, {"classifier", kClassifier}};
}

double late_ratio(const Json& sep) {
  const double a = sep.at("a").at("late_return"), b = sep.at("b").at("late_return");
  if (b == 0.0) return a > 0.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  return a / b;
}

void expect_pair(Verdict& v, const std::string& label, const Json& sep) {
  const std::string va = sep.at("a").at("verdict"), vb = sep.at("b").at("verdict");
  v.check(va == "RecurrentLeaning" && vb == "TransientLeaning",
          label + ": (" + va + ", " + vb + ") contraction " + num(sep.at("a").at("contraction")) + " / " +
              num(sep.at("b").at("contraction")));
}

// ---------------------------------------------------------------- criteria

Verdict criterion1(Runner& r) {
  Verdict v;
  double total = 0.0;
  for (double alpha : {0.7, 1.0, 1.5, 2.0}) {
    const auto out = r.run("c1_alpha" + num(alpha),
                           {{"experiment", "dist-check"}, {"seed", 101},
                            {"params", {{"alpha", alpha}, {"gamma", 1.0}, {"samples", 100000}, {"hill_samples", 0}}}});
    total += out.seconds;
    const double ks = out.results.at("ks");
    v.check(ks < 0.01, "alpha " + num(alpha) + " report KS " + num(ks));

    const auto p = stablelike::StableParams::make(alpha, 1.0);
    double worst = 0.0;
    for (double y : {-30.0, -4.0, -1.0, -0.2, 0.0, 0.2, 1.0, 4.0, 30.0})
      worst = std::max(worst, std::abs(stablelike::cdf(p, y) - oracle_cdf(alpha, y)));
    v.check(worst < 1e-7, "alpha " + num(alpha) + " cdf vs integral oracle " + num(worst));

    stablelike::RandomStream rng(9000 + static_cast<std::uint64_t>(alpha * 10));
    const stablelike::StableSampler sampler(p);
    std::vector<double> xs(100000);
    for (double& x : xs) x = sampler(rng);
    // Looser oracle tolerance per sample; KS needs far less than 1e-10.
    const double ks_oracle = ks_against(xs, [&](double x) { return oracle_cdf(alpha, x, 1e-10, 10); });
    v.check(ks_oracle < 0.01, "alpha " + num(alpha) + " KS vs oracle CDF " + num(ks_oracle));

    const double pdf0 = out.results.at("points").at(0).at("pdf");
    if (alpha == 1.0) v.check(std::abs(pdf0 - 1.0 / kPi) < 1e-6, "Cauchy pdf(0) error " + num(pdf0 - 1.0 / kPi));
    if (alpha == 2.0) {
      const double g = 1.0 / (2.0 * std::sqrt(kPi));
      v.check(std::abs(pdf0 - g) < 1e-6, "Gaussian pdf(0) error " + num(pdf0 - g));
    }
  }
  v.check(total < 60.0, "runtime " + num(total) + " s");
  return v;
}

Verdict criterion2(Runner& r) {
  Verdict v;
  for (double alpha : {0.7, 1.5}) {
    const auto out = r.run("c2_hill" + num(alpha),
                           {{"experiment", "dist-check"}, {"seed", 202},
                            {"params", {{"alpha", alpha}, {"samples", 1000}, {"hill_samples", 1000000}}}});
    const double h = out.results.at("hill").at("estimate");
    v.check(std::abs(h - alpha) <= 0.1, "Hill alpha " + num(alpha) + " -> " + num(h));
  }
  const auto out = r.run("c2_tail0.8", {{"experiment", "dist-check"}, {"seed", 203},
                                        {"params", {{"alpha", 0.8}, {"samples", 1000}, {"hill_samples", 0},
                                                    {"tail_y", {100.0}}}}});
  const double ratio = out.results.at("tail_ratio").at(0).at("ratio");
  v.check(std::abs(ratio - 1.0) < 0.05, "tail ratio at y=100 " + num(ratio));
  const double series = oracle_pdf_series(0.8, 100.0);
  const double lib = stablelike::pdf(stablelike::StableParams::make(0.8, 1.0), 100.0);
  v.check(std::abs(lib / series - 1.0) < 1e-6, "pdf(100) vs series " + num(lib / series - 1.0));
  const double oracle_ratio = series * std::pow(100.0, 1.8) / oracle_tail_constant(0.8);
  v.check(std::abs(oracle_ratio - ratio) < 1e-6, "oracle ratio " + num(oracle_ratio));
  return v;
}

Verdict criterion3(Runner& r) {
  Verdict v;
  const auto out = r.run("c3_sas", separation(spec_sas(1.5), spec_sas(0.7), 303));
  expect_pair(v, "SaS 1.5 vs 0.7", out.results);
  const double ratio = late_ratio(out.results);
  v.check(ratio >= 3.0, "late_return ratio " + num(ratio));
  v.check(out.seconds < 600.0, "runtime " + num(out.seconds) + " s");
  return v;
}

Verdict criterion4(Runner& r) {
  Verdict v;
  for (const char* kind : {"step", "smoothed_step"}) {
    const auto out = r.run(std::string("c4_") + kind,
                           separation(spec_step(kind, 1.6, 0.6), spec_step(kind, 0.6, 0.8), 404));
    expect_pair(v, kind, out.results);
  }
  return v;
}

Verdict criterion5(Runner& r) {
  Verdict v;
  for (double alpha : {1.5, 0.7}) {
    const auto out = r.run("c5_sas" + num(alpha),
                           {{"experiment", "scale-invariance"}, {"seed", 505}, {"spec", spec_sas(alpha)},
                            {"classifier", kClassifier}, {"params", {{"factors", {5.0, 0.2}}}}});
    const std::string base = out.results.at("base").at("verdict");
    v.check(base != "Inconclusive", "alpha " + num(alpha) + " base " + base);
    for (const auto& s : out.results.at("scaled")) {
      const std::string sv = s.at("scaled").at("verdict");
      v.check(sv == base, "alpha " + num(alpha) + " c=" + num(s.at("c")) + " " + sv);
    }
  }
  return v;
}

Verdict criterion6(Runner& r) {
  Verdict v;
  const Json a = spec_periodic(1.4, 1.8), b = spec_periodic(0.7, 1.4);
  for (const auto& [spec, alpha0] : {std::pair{a, 1.4}, std::pair{b, 0.7}}) {
    const auto prof = stablelike::profile_from_json(spec.at("alpha"), "/alpha");
    const int n = 200000;
    int on = 0;
    double lo = 1e9;
    for (int i = 0; i < n; ++i) {
      const double x = 2.0 * (i + 0.5) / n;
      lo = std::min(lo, prof(x));
      on += prof(x) == alpha0;
    }
    const double measure = 2.0 * on / n;
    v.check(lo == alpha0 && std::abs(measure - 1.0) < 1e-3,
            "plateau alpha0 " + num(alpha0) + " measure " + num(measure) + " (tau/2 = 1)");
  }
  const auto out = r.run("c6_periodic", separation(a, b, 606));
  expect_pair(v, "plateau 1.4 vs 0.7", out.results);
  return v;
}

Verdict criterion7(Runner& r) {
  Verdict v;
  for (double alpha : {0.5, 1.5}) {
    const auto out = r.run("c7_cf" + num(alpha), {{"experiment", "cf-test"}, {"seed", 707},
                                                  {"params", {{"alpha", alpha}, {"J", 1000}}}});
    const double a = out.results.at("profile").at("local_exponent");
    v.check(std::abs(a - alpha) <= 0.05, "local exponent alpha " + num(alpha) + " -> " + num(a));
  }
  const auto out = r.run("c7_embedded", {{"experiment", "embedded"}, {"seed", 708},
                                         {"spec", {{"kind", "discrete"}, {"alphas", {0.7, 1.5}}, {"J", 500}}}});
  const auto& res = out.results;
  const std::string verdict = res.at("verdict");
  v.check(verdict == "TransientLeaning", "classify_discrete(0.7,1.5) " + verdict);
  const auto& e = res.at("embedded");
  const double deficit = e.at("deficit"), bound = e.at("error_bound");
  const double remaining = e.at("remaining"), ckmax = e.at("C_kmax");
  const double c = e.at("C");
  const int kmax = e.at("k_max");
  v.check(deficit <= 1e-6, "mass deficit " + num(deficit));
  v.check(deficit <= bound && remaining <= ckmax, "deficit " + num(deficit) + " <= bound " + num(bound) +
                                                      ", remaining " + num(remaining) + " <= C^kmax " + num(ckmax));
  v.check(std::abs(std::pow(c, kmax) - ckmax) <= 1e-12 * ckmax, "C^kmax recomputed");
  v.check(e.at("bound_honored").get<bool>(), "bound_honored flag");
  v.check(e.at("lower_bound_ok").get<bool>() && e.at("lower_bound_min_gap").get<double>() >= 0.0,
          "q(2i) >= f(2i), min gap " + num(e.at("lower_bound_min_gap")));
  return v;
}

Verdict criterion8(Runner& r) {
  Verdict v;
  const auto out = r.run("c8_attraction", {{"experiment", "cf-test"}, {"seed", 808},
                                           {"params", {{"alpha", 1.5}, {"J", 1000},
                                                       {"attraction", {{"n_list", {100, 1000, 10000}},
                                                                       {"samples", 10000}}}}}});
  const auto ks = out.results.at("attraction").at("ks").get<std::vector<double>>();
  v.check(ks.size() == 3 && ks[0] > ks[1] && ks[1] > ks[2],
          "KS " + num(ks.at(0)) + " > " + num(ks.at(1)) + " > " + num(ks.at(2)));
  v.check(ks.at(2) < 0.03, "KS at n=1e4 " + num(ks.at(2)));
  const double kappa = out.results.at("tail_kappa");
  const double tg = kappa / oracle_tail_constant(1.5);
  v.check(std::abs(tg / out.results.at("attraction").at("tail_gamma").get<double>() - 1.0) < 1e-12,
          "tail gamma " + num(tg));
  return v;
}

Verdict criterion9(Runner& r) {
  Verdict v;
  const Json spec = spec_periodic(0.8, 1.4);
  const double t = 1.0;
  const auto out = r.run("c9_limit", {{"experiment", "limit"}, {"seed", 909}, {"spec", spec},
                                      {"params", {{"steps", 1000000}, {"bins", 200}, {"n_list", {10, 100, 1000}},
                                                  {"ks_n", {10, 1000}}, {"t", t}, {"paths", 10000},
                                                  {"g", {{"type", "indicator"}, {"level", 1.0}}}}}});
  const auto& res = out.results;
  const double defect = res.at("stationarity_defect");
  v.check(defect < 0.02, "stationarity defect " + num(defect));

  // Theta from the histogram: plateau mass weighted by the jump-law constant.
  const auto prof = stablelike::profile_from_json(spec.at("alpha"), "/alpha");
  const auto& h = res.at("histogram");
  const auto w = h.at("weights").get<std::vector<double>>();
  const double tau = h.at("tau"), origin = h.at("origin");
  const double alpha0 = 0.8;
  double theta = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b) {
    const double a = prof(origin + (b + 0.5) * tau / w.size());
    if (a <= alpha0 + 1e-9) theta += oracle_pareto_scale(a) * w[b];
  }
  v.check(std::abs(theta - res.at("theta").at("value").get<double>()) < 1e-12, "Theta " + num(theta));
  const double target = 2.0 * theta * t / alpha0;
  for (const auto& c : res.at("characteristics")) {
    v.check(c.at("B").get<double>() == 0.0, "B^n = 0 at n=" + num(c.at("n")));
    if (c.at("n").get<double>() == 1000.0) {
      const double rel = c.at("nu_g").get<double>() / target - 1.0;
      v.check(std::abs(rel) < 0.10, "nu_g at n=1e3 vs 2 Theta t / alpha0: " + num(rel));
    }
  }
  v.check(res.at("limit_characteristics").at("B").get<double>() == 0.0, "limit B = 0");
  const auto& mk = res.at("marginal_ks");
  const double ks10 = mk.at(0).at("ks"), ks1000 = mk.at(1).at("ks");
  v.check(ks1000 < 0.05 && ks1000 < ks10, "marginal KS n=10 " + num(ks10) + ", n=1e3 " + num(ks1000));

  const auto uni = r.run("c9_uniform", {{"experiment", "invariant-measure"}, {"seed", 910},
                                        {"spec", {{"kind", "periodic_pareto"}, {"tau", 2.0}, {"alpha", 1.2}}},
                                        {"params", {{"steps", 1000000}, {"bins", 16}}}});
  const auto& uh = uni.results.at("histogram");
  const auto uw = uh.at("weights").get<std::vector<double>>();
  const auto use = uh.at("se").get<std::vector<double>>();
  double zmax = 0.0;
  for (std::size_t b = 0; b < uw.size(); ++b) zmax = std::max(zmax, std::abs(uw[b] - 1.0 / uw.size()) / use[b]);
  v.check(uw.size() == 16 && zmax <= 3.0, "uniform check max |z| " + num(zmax) + " over " + std::to_string(uw.size()) + " bins");
  return v;
}

Verdict criterion10(Runner& r) {
  Verdict v;
  const auto out = r.run("c10_generator",
                         {{"experiment", "simulate"}, {"seed", 1010}, {"spec", spec_step("smoothed_step", 1.6, 0.6)},
                          {"params", {{"steps", 10}, {"paths", 1},
                                      {"generator_check", {{"a", 1.0}, {"kappa", 1.0},
                                                           {"bumps", {{{"center", 0.0}, {"radius", 2.0}},
                                                                      {{"center", 3.0}, {"radius", 1.5}}}},
                                                           {"x", {0.0, 3.0}}, {"h", {0.1, 0.05, 0.025}},
                                                           {"runs", 100000}}}}}});
  const auto& checks = out.results.at("generator_check").at("checks");
  v.check(checks.size() == 4, std::to_string(checks.size()) + " (bump, x) pairs");
  for (const auto& c : checks) {
    const double g = c.at("generator");
    const auto q = c.at("quotients").get<std::vector<double>>();
    std::vector<double> err;
    for (double qi : q) err.push_back(std::abs(qi - g));
    const bool dec = err.size() == 3 && err[0] > err[1] && err[1] > err[2];
    v.check(dec, "bump " + num(c.at("bump_center")) + " x=" + num(c.at("x")) + " errors " + num(err.at(0)) + " " +
                     num(err.at(1)) + " " + num(err.at(2)));
  }
  return v;
}

Verdict criterion11(Runner& r) {
  Verdict v;
  const auto step = r.run("c11_step", {{"experiment", "classify"}, {"seed", 1111},
                                       {"spec", spec_step("step", 1.4, 0.6)}, {"classifier", kClassifier}});
  const auto& sr = step.results.at("result");
  const std::string sv = sr.at("verdict");
  v.check(sv == "Inconclusive", "step(1.4,0.6) " + sv + " contraction " + num(sr.at("contraction")) + " +- " +
                                    num(sr.at("contraction_se")));
  for (const auto& alphas : {std::vector<double>{1.0, 1.5}, std::vector<double>{1.0, 1.0}}) {
    const auto out = r.run("c11_discrete_" + num(alphas[0]) + "_" + num(alphas[1]),
                           {{"experiment", "embedded"}, {"seed", 1112},
                            {"spec", {{"kind", "discrete"}, {"alphas", alphas}, {"J", 500}}}});
    const std::string dv = out.results.at("verdict");
    v.check(dv == "Inconclusive", "discrete (" + num(alphas[0]) + "," + num(alphas[1]) + ") " + dv);
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  Runner runner;
  runner.root = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out";
  fs::remove_all(runner.root);

  const std::vector<std::function<Verdict(Runner&)>> criteria = {
      criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  fs::create_directories(runner.root);
  std::ofstream log(runner.root / "acceptance.txt");
  auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    log << line << '\n' << std::flush;
  };
  int failures = 0;
  auto report = [&](int id, const Verdict& v, double seconds) {
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d: %s (%.1f s)", id, v.pass ? "PASS" : "FAIL", seconds);
    emit(head);
    for (const auto& n : v.notes) emit("    " + n);
    failures += !v.pass;
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i](runner);
    } catch (const std::exception& e) {
      v.check(false, std::string("error: ") + e.what());
    }
    report(static_cast<int>(i + 1), v, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }

  Verdict det;
  det.check(runner.mismatches.empty(), std::to_string(runner.runs.size() - runner.mismatches.size()) + "/" +
                                           std::to_string(runner.runs.size()) + " runs byte-identical");
  for (const auto& m : runner.mismatches) det.check(false, "differs: " + m);
  report(12, det, 0.0);

  emit(std::to_string(failures) + " of 12 criteria failed");
  return failures == 0 ? 0 : 1;
}
