#include "jumplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "jumplab/common.hpp"

namespace jumplab {

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) throw ConfigError("wilson_interval: n must be positive");
  if (successes > n) throw ConfigError("wilson_interval: successes exceed n");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  r.critical = c * std::sqrt((na + nb) / (na * nb));
  r.reject = r.statistic > r.critical;
  return r;
}

double chi_square_sf(double x, int k) {
  if (k <= 0) throw ConfigError("chi_square_sf: dof must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw ConfigError("chi_square_gof: size mismatch");
  // Merge low-expectation cells left to right so every retained cell has
  // expected mass at least min_expected.
  std::vector<double> obs, exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += expected[i];
    if (acc_e >= min_expected) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (obs.empty()) {
      obs.push_back(acc_o);
      exp.push_back(acc_e);
    } else {
      obs.back() += acc_o;
      exp.back() += acc_e;
    }
  }
  if (obs.size() < 2) throw ConfigError("chi_square_gof: fewer than two usable cells");
  ChiSquareResult r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] <= 0.0) throw ConfigError("chi_square_gof: nonpositive expected cell");
    const double diff = obs[i] - exp[i];
    r.statistic += diff * diff / exp[i];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw ConfigError("fit_line: size mismatch");
  const std::size_t n = t.size();
  if (n < 2) throw ConfigError("fit_line: need at least two points");
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (t[i] - mt) * (t[i] - mt);
    sxy += (t[i] - mt) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ConfigError("fit_line: degenerate abscissae");
  LineFit f;
  f.n_points = static_cast<int>(n);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mt;
  if (n == 2) {
    f.se_slope = 0.0;
    f.p_slope = f.slope < 0.0 ? 0.0 : 1.0;
    return f;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * t[i]);
    sse += r * r;
  }
  const double sigma2 = sse / static_cast<double>(n - 2);
  f.se_slope = std::sqrt(sigma2 / sxx);
  if (f.se_slope <= 0.0) {
    f.p_slope = f.slope < 0.0 ? 0.0 : 1.0;
    return f;
  }
  const double tstat = f.slope / f.se_slope;
  boost::math::students_t dist(static_cast<double>(n - 2));
  f.p_slope = boost::math::cdf(dist, tstat);  // P(T <= tstat): small when slope << 0
  return f;
}

SampleMoments sample_moments(const std::vector<double>& xs) {
  SampleMoments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  double s = 0.0;
  for (double x : xs) s += x;
  m.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double v = 0.0;
    for (double x : xs) v += (x - m.mean) * (x - m.mean);
    m.variance = v / static_cast<double>(xs.size() - 1);
  }
  return m;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol, int max_depth) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw ConfigError("integrate_adaptive: inverted interval");
  }
  if (!std::isfinite(a) || !std::isfinite(b))
    throw ConfigError("integrate_adaptive: endpoints must be finite");
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, b - a);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a, double tol) {
  // r = a + s/(1-s), dr = ds/(1-s)^2; the upper endpoint is pulled in slightly
  // to avoid evaluating at s = 1.
  auto g = [&](double s) {
    const double om = 1.0 - s;
    const double r = a + s / om;
    const double v = f(r) / (om * om);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate_adaptive(g, 0.0, 1.0 - 1e-12, tol);
}

}  // namespace jumplab
