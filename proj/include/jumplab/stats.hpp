#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace jumplab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion (default 95%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

struct KsResult {
  double statistic = 0.0;   // sup |F1 - F2|
  double critical = 0.0;    // rejection threshold at the given significance
  bool reject = false;
};

// Two-sample Kolmogorov-Smirnov test (asymptotic critical value
// c(alpha) * sqrt((n+m)/(n*m)), c(alpha) = sqrt(-ln(alpha/2)/2)).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 0.0;
};

// Goodness of fit of observed counts against expected counts (same total).
// Cells with expected < min_expected are merged into their right neighbor.
ChiSquareResult chi_square_gof(const std::vector<double>& observed,
                               const std::vector<double>& expected,
                               double min_expected = 5.0);

// Upper tail of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, int k);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double se_slope = 0.0;
  double p_slope = 1.0;  // one-sided p-value for slope < 0
  int n_points = 0;
};

// Ordinary least squares y = intercept + slope * t with a one-sided
// Student-t test of slope < 0.
LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::size_t n = 0;
};

SampleMoments sample_moments(const std::vector<double>& xs);

// Adaptive Simpson quadrature on [a, b] (finite). Subdivision stops when the
// local Richardson error estimate is below tol (absolute); depth capped.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double tol = 1e-11, int max_depth = 48);

// Quadrature on [a, inf) via the substitution r = a + s/(1-s), s in [0,1).
// The integrand must decay fast enough to be integrable.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double tol = 1e-11);

}  // namespace jumplab
