#include "stablelike/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>

#include "stablelike/errors.hpp"

namespace stablelike {

namespace {

// Raw |K15 - G7| error estimate plus the L1 mass of the panel, used for a
// roundoff floor so tolerances below machine resolution do not spin forever.
struct Rule {
  double value, error, l1;
};

Rule k15(const Integrand& f, double a, double b) {
  using K = boost::math::quadrature::gauss_kronrod<double, 15>;
  using G = boost::math::quadrature::gauss<double, 7>;
  static const auto& xk = K::abscissa();
  static const auto& wk = K::weights();
  static const auto& wg = G::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double f0 = f(c);
  double kr = wk[0] * f0, gr = wg[0] * f0, l1 = wk[0] * std::abs(f0);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fl = f(c - h * xk[i]), fr = f(c + h * xk[i]);
    kr += wk[i] * (fl + fr);
    l1 += wk[i] * (std::abs(fl) + std::abs(fr));
    if (i % 2 == 0) gr += wg[i / 2] * (fl + fr);
  }
  return {kr * h, std::abs((kr - gr) * h), l1 * std::abs(h)};
}

}  // namespace

QuadResult kronrod15(const Integrand& f, double a, double b) {
  const Rule r = k15(f, a, b);
  return {r.value, r.error, 1};
}

namespace {

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

QuadResult adapt(const Integrand& f, double a, double b, const QuadConfig& cfg, bool& ok) {
  std::priority_queue<Panel> heap;
  const Rule first = k15(f, a, b);
  heap.push({a, b, first.value, first.error, first.l1});
  double total = first.value, err = first.error, l1 = first.l1;
  int n = 0;
  constexpr double kFloor = 50.0 * std::numeric_limits<double>::epsilon();
  auto target = [&] {
    return std::max({cfg.abs_tol, cfg.rel_tol * std::abs(total), kFloor * l1});
  };
  while (err > target() && n < cfg.max_subdivisions) {
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {  // interval at machine resolution
      heap.push(p);
      break;
    }
    const Rule l = k15(f, p.a, m), r = k15(f, m, p.b);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    l1 += l.l1 + r.l1 - p.l1;
    heap.push({p.a, m, l.value, l.error, l.l1});
    heap.push({m, p.b, r.value, r.error, r.l1});
    ++n;
  }
  // Re-sum to remove drift from the running updates.
  total = err = l1 = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  ok = err <= target();
  return {total, err, n};
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadConfig& cfg) {
  bool ok = false;
  auto r = adapt(f, a, b, cfg, ok);
  if (!ok) {
    throw NumericalError("adaptive quadrature did not converge within " +
                             std::to_string(cfg.max_subdivisions) + " subdivisions",
                         r.error);
  }
  return r;
}

QuadResult integrate_nothrow(const Integrand& f, double a, double b, const QuadConfig& cfg) {
  bool ok = false;
  return adapt(f, a, b, cfg, ok);
}

QuadResult wynn_epsilon(const std::vector<double>& s) {
  const std::size_t n = s.size();
  if (n < 3) return {n ? s.back() : 0.0, std::numeric_limits<double>::infinity(), 0};
  double best = s.back();
  double best_err = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> table(n);
  for (std::size_t i = 0; i < n; ++i) table[i].assign(n - i + 1, 0.0);
  // table[i][k] holds eps_{k-1} built from s[i..]; column 0 is eps_{-1} = 0.
  for (std::size_t i = 0; i < n; ++i) table[i][1] = s[i];
  // Columns are built until a difference underflows relative to its operands;
  // past that point the table carries no information.
  std::size_t built = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    bool degenerate = false;
    for (std::size_t i = 0; i + k <= n; ++i) {
      const double d = table[i + 1][k - 1] - table[i][k - 1];
      const double scale = std::max(std::abs(table[i + 1][k - 1]), std::abs(table[i][k - 1]));
      if (!(std::abs(d) > 1e-15 * scale) || !std::isfinite(d)) {
        degenerate = true;
        break;
      }
      table[i][k] = table[i + 1][k - 2] + 1.0 / d;
    }
    if (degenerate) break;
    built = k;
  }
  // Odd table columns are the estimates. Deep columns amplify roundoff, so take
  // the estimate closest to its predecessor.
  std::vector<double> est;
  for (std::size_t k = 1; k <= built; k += 2) est.push_back(table[n - k][k]);
  for (std::size_t j = 1; j < est.size(); ++j) {
    const double err = std::abs(est[j] - est[j - 1]);
    if (err < best_err) {
      best_err = err;
      best = est[j];
    }
  }
  if (std::isfinite(best_err)) best_err += 10.0 * std::numeric_limits<double>::epsilon() * std::abs(best);
  return {best, best_err, static_cast<int>(n)};
}

}  // namespace stablelike
