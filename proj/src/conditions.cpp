#include "jumplab/conditions.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "jumplab/engine.hpp"

namespace jumplab {

namespace {

int numerical_rank(const Mat& columns, double rel_tol) {
  if (columns.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(columns);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) >= rel_tol * s(0)) ++rank;
  return rank;
}

double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= xs.size()) return xs.back();
  const double frac = pos - static_cast<double>(i);
  return xs[i] * (1.0 - frac) + xs[i + 1] * frac;
}

}  // namespace

RReport check_R(const Model& model, const std::function<double(const Vec&)>& phi,
                const std::function<Vec(const Vec&)>& grad_phi, const std::string& phi_name,
                const std::vector<Vec>& grid, const std::vector<double>& alpha_grid) {
  if (grid.empty()) throw ConfigError("check_R: empty grid");
  if (alpha_grid.empty()) throw ConfigError("check_R: empty alpha grid");
  for (double a : alpha_grid)
    if (!(a > 0.0)) throw ConfigError("check_R: alpha values must be positive");

  const std::size_t n = grid.size();
  std::vector<double> phi_v(n), aphi(n), norms(n);
  double max_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    phi_v[i] = phi(grid[i]);
    if (phi_v[i] < 0.0) throw ConfigError("check_R: phi must be nonnegative on the grid");
    aphi[i] = generator_apply(model, phi, grad_phi, grid[i]);
    norms[i] = grid[i].norm();
    max_norm = std::max(max_norm, norms[i]);
  }
  std::vector<std::size_t> interior, boundary;
  for (std::size_t i = 0; i < n; ++i)
    (norms[i] >= 0.9 * max_norm ? boundary : interior).push_back(i);
  if (interior.empty() || boundary.empty())
    throw ConfigError("check_R: grid needs both interior and boundary-ring points");

  RReport report;
  report.phi_name = phi_name;

  for (double alpha : alpha_grid) {
    double max_interior = -kInf, max_boundary = -kInf;
    for (std::size_t i : interior) max_interior = std::max(max_interior, aphi[i] + alpha * phi_v[i]);
    for (std::size_t i : boundary) max_boundary = std::max(max_boundary, aphi[i] + alpha * phi_v[i]);
    const bool witnessed = max_boundary <= max_interior + 1e-9 * (1.0 + std::abs(max_interior));
    if (witnessed && (!report.alpha_witnessed || alpha > report.alpha_hat)) {
      report.alpha_witnessed = true;
      report.alpha_hat = alpha;
      report.gamma_hat = std::max(max_interior, max_boundary);
    }
  }

  if (report.alpha_witnessed) {
    report.margin = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      const double slack = report.gamma_hat - aphi[i] - report.alpha_hat * phi_v[i];
      report.margin = std::min(report.margin, slack);
      if (slack < 0.0) report.violations.push_back(grid[i]);
    }
  }

  std::vector<double> phi_interior;
  phi_interior.reserve(interior.size());
  for (std::size_t i : interior) phi_interior.push_back(phi_v[i]);
  double min_phi_boundary = kInf;
  for (std::size_t i : boundary) min_phi_boundary = std::min(min_phi_boundary, phi_v[i]);
  report.phi_grows = min_phi_boundary > quantile(phi_interior, 0.9);

  report.pass = report.alpha_witnessed && report.violations.empty() && report.phi_grows;
  return report;
}

NReport check_N_mc(const Model& model, const Vec& x_star, double t_star,
                   const SimParams& params, double svd_tol) {
  if (!(t_star > 0.0)) throw ConfigError("check_N_mc: t_star must be positive");
  if (t_star > params.horizon)
    throw ConfigError("check_N_mc: t_star exceeds params.horizon");

  std::vector<unsigned char> full_rank(params.n_paths, 0);
  std::vector<std::uint64_t> excluded(params.n_paths, 0);
  for_each_path(params.n_paths, params.workers, [&](std::uint64_t i) {
    Rng rng(params.seed, stream::kConditionN, i);
    const Trajectory traj = simulate_path(model, x_star, params, rng);
    if (traj.exploded) return;  // no usable span
    const ExponentLog log = propagate_exponent(model, traj);
    const InfluenceVectors infl = jump_influence_vectors(model, traj, log, t_star);
    excluded[i] = infl.excluded_jump_count;
    if (infl.vectors.empty()) return;
    Mat columns(model.m, static_cast<int>(infl.vectors.size()));
    for (std::size_t j = 0; j < infl.vectors.size(); ++j)
      columns.col(static_cast<int>(j)) = infl.vectors[j];
    if (numerical_rank(columns, svd_tol) == model.m) full_rank[i] = 1;
  });

  NReport report;
  report.n_paths = params.n_paths;
  report.svd_tolerance = svd_tol;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < params.n_paths; ++i) {
    hits += full_rank[i];
    report.excluded_jump_count += excluded[i];
  }
  report.p_hat = static_cast<double>(hits) / static_cast<double>(params.n_paths);
  report.wilson_ci = wilson_interval(hits, params.n_paths);
  report.evidence = report.wilson_ci.lo > 0.0;
  return report;
}

NStaticReport check_N_static(const Model& model, const Vec& x_star, double epsilon,
                             int n_directions) {
  NStaticReport report;
  report.epsilon = epsilon;
  Rng rng(0x5EEDF00DULL, stream::kConditionN, 0);

  const bool scalar_route = model.m == 1 && n_directions <= 0;
  if (scalar_route) {
    auto pred = [&](const Vec& u) {
      const HatDelta h = hat_delta(model, x_star, u);
      return h.invertible && h.value.cwiseAbs().maxCoeff() > kNumericZero;
    };
    const RegionMass rm = region_mass(model.measure, pred, &rng);
    report.min_mass = rm.value;
    report.error_bound = rm.error_bound;
    report.n_directions = 0;
  } else {
    if (n_directions < 1) throw ConfigError("check_N_static: n_directions must be positive");
    if (!(epsilon > 0.0)) throw ConfigError("check_N_static: epsilon must be positive");
    const std::vector<Vec> dirs = sphere_covering(model.m, n_directions);
    report.n_directions = static_cast<int>(dirs.size());
    report.min_mass = kInf;
    for (const Vec& v : dirs) {
      auto pred = [&](const Vec& u) {
        if (model.jump(x_star, u).norm() >= epsilon) return false;
        const HatDelta h = hat_delta(model, x_star, u);
        return h.invertible && std::abs(h.value.dot(v)) > kNumericZero;
      };
      const RegionMass rm = region_mass(model.measure, pred, &rng);
      if (rm.value < report.min_mass) {
        report.min_mass = rm.value;
        report.error_bound = rm.error_bound;
      }
    }
  }
  report.pass = report.min_mass > 0.0;
  return report;
}

NRankReport check_N_rank(const Model& model, const Vec& x_star, double fd_step) {
  if (!(fd_step > 0.0)) throw ConfigError("check_N_rank: fd_step must be positive");
  NRankReport report;
  if (model.jump_case == JumpCase::kB) {
    report.additive = true;
    report.det = model.drift_jacobian(x_star).determinant();
    report.pass = std::abs(report.det) > kNumericZero;
    return report;
  }
  report.additive = false;
  const int m = model.m, d = model.d;

  auto atilde = [&](const Vec& y) {
    return effective_drift(model, y, model.delta_truncation);
  };
  const Vec a0 = atilde(x_star);
  Mat grad_a(m, m);
  if (std::isinf(model.delta_truncation)) {
    grad_a = model.drift_jacobian(x_star);
  } else {
    for (int k = 0; k < m; ++k) {
      Vec e = Vec::Zero(m);
      e[k] = fd_step;
      grad_a.col(k) = (atilde(x_star + e) - atilde(x_star - e)) / (2.0 * fd_step);
    }
  }

  auto chi_at = [&](const Vec& x) {
    Mat chi(m, d);
    for (int j = 0; j < d; ++j) {
      Vec e = Vec::Zero(d);
      e[j] = fd_step;
      chi.col(j) = (model.jump(x, e) - model.jump(x, -e)) / (2.0 * fd_step);
    }
    return chi;
  };
  const Mat chi = chi_at(x_star);
  Mat grad_chi_a = Mat::Zero(m, d);
  for (int k = 0; k < m; ++k) {
    Vec e = Vec::Zero(m);
    e[k] = fd_step;
    grad_chi_a += ((chi_at(x_star + e) - chi_at(x_star - e)) / (2.0 * fd_step)) * a0[k];
  }

  const Mat bracket = grad_a * chi - grad_chi_a;
  Eigen::JacobiSVD<Mat> svd(bracket);
  // The bracket is a difference of two products; when the pair commutes the
  // exact value is zero and only finite-difference noise remains. A purely
  // relative rank test would count that noise, so singular values are also
  // floored against the magnitude of the cancelling terms.
  const double term_scale = grad_a.norm() * chi.norm() + grad_chi_a.norm();
  const double floor = 1e-7 * (1.0 + term_scale);
  const auto& sv = svd.singularValues();
  report.rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    report.singular_values.push_back(sv(i));
    if (sv(i) >= std::max(floor, kSvdRelTol * sv(0))) ++report.rank;
  }
  report.pass = report.rank == m;

  // Small-ball cone mass: worst case over cone axes w of the measure of
  // {u : |(w,u)| >= 0.5·||w||·||u||, ||u|| <= delta}.
  Rng rng(0x5EEDF00DULL, stream::kConditionN, 1);
  const std::vector<Vec> axes = sphere_covering(d, d == 1 ? 2 : 8);
  for (double delta : {0.125, 0.25, 0.5, 1.0}) {
    double worst = kInf;
    for (const Vec& w : axes) {
      auto pred = [&](const Vec& u) {
        const double norm = u.norm();
        return norm <= delta && std::abs(w.dot(u)) >= 0.5 * norm;
      };
      worst = std::min(worst, region_mass(model.measure, pred, &rng).value);
    }
    report.cone_mass.emplace_back(delta, worst);
  }
  return report;
}

SReport check_S(const Model& model, const Vec& x_star, const std::vector<double>& radius_list,
                double t, double epsilon, const SimParams& params) {
  if (!(t > 0.0)) throw ConfigError("check_S: t must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("check_S: epsilon must be positive");
  if (static_cast<int>(x_star.size()) != model.m)
    throw ConfigError("check_S: x_star dimension mismatch");

  std::vector<std::pair<double, Vec>> starts;
  starts.emplace_back(0.0, Vec::Zero(model.m));
  const int per_sphere = model.m == 1 ? 2 : (model.m == 2 ? 8 : 12);
  for (double r : radius_list) {
    if (!(r > 0.0)) throw ConfigError("check_S: radii must be positive");
    for (const Vec& dir : sphere_covering(model.m, per_sphere)) starts.emplace_back(r, r * dir);
  }

  SimParams run = params;
  run.horizon = t;

  SReport report;
  report.t = t;
  report.epsilon = epsilon;
  report.evidence = true;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    std::vector<unsigned char> hit_min(params.n_paths, 0), hit_t(params.n_paths, 0);
    for_each_path(params.n_paths, params.workers, [&](std::uint64_t i) {
      Rng rng(params.seed, stream::kConditionS, s * params.n_paths + i);
      double min_dist = kInf;
      auto observe = [&](double, const Vec& x) {
        min_dist = std::min(min_dist, (x - x_star).norm());
      };
      const SimOutcome out = simulate(model, starts[s].second, run, rng, observe);
      hit_min[i] = min_dist < epsilon ? 1 : 0;
      hit_t[i] = (!out.exploded && (out.terminal - x_star).norm() < epsilon) ? 1 : 0;
    });
    SEntry entry;
    entry.radius = starts[s].first;
    entry.start = starts[s].second;
    entry.n_paths = params.n_paths;
    std::uint64_t n_min = 0, n_t = 0;
    for (std::uint64_t i = 0; i < params.n_paths; ++i) {
      n_min += hit_min[i];
      n_t += hit_t[i];
    }
    entry.freq_running_min = static_cast<double>(n_min) / static_cast<double>(params.n_paths);
    entry.freq_at_t = static_cast<double>(n_t) / static_cast<double>(params.n_paths);
    if (!(entry.freq_running_min > 0.0)) report.evidence = false;
    report.entries.push_back(entry);
  }
  return report;
}

std::vector<Vec> sphere_covering(int dim, int n_points) {
  if (dim < 1) throw ConfigError("sphere_covering: dimension must be positive");
  if (n_points < 1) throw ConfigError("sphere_covering: need at least one point");
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(scalar_vec(1.0));
    dirs.push_back(scalar_vec(-1.0));
    return dirs;
  }
  if (dim == 2) {
    for (int k = 0; k < n_points; ++k) {
      const double angle = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n_points);
      Vec v(2);
      v << std::cos(angle), std::sin(angle);
      dirs.push_back(v);
    }
    return dirs;
  }
  if (dim == 3) {
    // Fibonacci lattice on the sphere.
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 0; k < n_points; ++k) {
      const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(n_points);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double angle = 2.0 * M_PI * static_cast<double>(k) / golden;
      Vec v(3);
      v << r * std::cos(angle), r * std::sin(angle), z;
      dirs.push_back(v);
    }
    return dirs;
  }
  // Higher dimensions: deterministic seeded directions.
  Rng rng(0xD1CE0000ULL + static_cast<std::uint64_t>(dim), 0, 0);
  while (static_cast<int>(dirs.size()) < n_points) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    const double norm = v.norm();
    if (norm > 0.0) dirs.push_back(v / norm);
  }
  return dirs;
}

}  // namespace jumplab
