#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/sde.hpp"
#include "jumplab/stats.hpp"

namespace jumplab {

// Drift-condition report: largest grid-witnessed alpha with its minimal gamma.
struct RReport {
  double alpha_hat = 0.0;
  double gamma_hat = 0.0;
  double margin = 0.0;  // min over grid of (-Aphi - alpha*phi + gamma)
  std::vector<Vec> violations;
  std::string phi_name;
  bool alpha_witnessed = false;  // some alpha kept Aphi + alpha*phi from growing at the rim
  bool phi_grows = false;        // phi on the rim exceeds the interior 0.9-quantile
  bool pass = false;
};

// For each alpha in alpha_grid the minimal gamma is max over the grid of
// (Aphi + alpha*phi). alpha is accepted when that field attains its maximum
// away from the boundary ring (norm >= 0.9 * largest grid norm); the report
// carrries the largest accepted alpha. pass = no violations, accepted alpha
// exists, and phi grows toward the rim.
RReport check_R(const Model& model, const std::function<double(const Vec&)>& phi,
                const std::function<Vec(const Vec&)>& grad_phi, const std::string& phi_name,
                const std::vector<Vec>& grid, const std::vector<double>& alpha_grid);

struct NReport {
  double p_hat = 0.0;
  Interval wilson_ci;
  std::uint64_t n_paths = 0;
  double svd_tolerance = kSvdRelTol;
  std::uint64_t excluded_jump_count = 0;
  bool evidence = false;  // Wilson lower bound > 0
};

// Monte Carlo check of full-rank jump influence span at t_star: p_hat is the
// fraction of paths whose influence vectors have numerical rank m.
NReport check_N_mc(const Model& model, const Vec& x_star, double t_star,
                   const SimParams& params, double svd_tol = kSvdRelTol);

struct NStaticReport {
  double min_mass = 0.0;
  double error_bound = 0.0;
  int n_directions = 0;  // 0 = scalar route (no direction quantifier)
  double epsilon = 0.0;
  bool pass = false;  // min_mass > 0
};

// Static mass check: m = 1 measures {u : |hat_delta| > 0}; m >= 2 takes the
// minimum over a deterministic sphere covering v of the mass of
// {u : |(hat_delta, v)| > 0 and ||c(x*,u)|| < epsilon}. With m = 1 a positive
// n_directions forces the direction-quantified route (covering = {+1, -1}).
NStaticReport check_N_static(const Model& model, const Vec& x_star, double epsilon,
                             int n_directions);

struct NRankReport {
  bool additive = true;                 // case B route
  double det = 0.0;                     // case B: det grad a(x*)
  std::vector<double> singular_values;  // case A bracket matrix
  int rank = 0;
  bool pass = false;
  std::vector<std::pair<double, double>> cone_mass;  // (delta, min mass over cone axes)
};

// Jacobian-rank check at x*: case B tests det grad a(x*) != 0; case A builds
// the bracket grad a(x*)·chi(x*) - (grad chi)(x*)[a(x*)] by central finite
// differences and tests full rank, plus small-ball cone mass probes.
NRankReport check_N_rank(const Model& model, const Vec& x_star, double fd_step = 1e-5);

struct SEntry {
  double radius = 0.0;
  Vec start;
  double freq_running_min = 0.0;  // min over [0,t] of |X - x*| < epsilon
  double freq_at_t = 0.0;         // |X(t) - x*| < epsilon
  std::uint64_t n_paths = 0;
};

struct SReport {
  double t = 0.0;
  double epsilon = 0.0;
  std::vector<SEntry> entries;
  bool evidence = false;  // every start reached the ball at least once
};

// Reachability table: starting points cover each sphere ||x|| = R plus the
// origin; per start the frequency of approaching x* within epsilon.
SReport check_S(const Model& model, const Vec& x_star, const std::vector<double>& radius_list,
                double t, double epsilon, const SimParams& params);

// Deterministic covering of the unit sphere in the given dimension with
// roughly n_points directions (exact layout depends on the dimension).
std::vector<Vec> sphere_covering(int dim, int n_points);

}  // namespace jumplab
