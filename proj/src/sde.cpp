#include "jumplab/sde.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "jumplab/stats.hpp"

namespace jumplab {

void SimParams::validate() const {
  if (!(dt > 0.0)) throw ConfigError("SimParams: dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("SimParams: horizon must be positive");
  if (truncation < 0.0) throw ConfigError("SimParams: truncation must be nonnegative");
  if (n_paths < 1) throw ConfigError("SimParams: n_paths must be at least 1");
  if (workers < 1) throw ConfigError("SimParams: workers must be at least 1");
  if (!(overflow_bound > 0.0)) throw ConfigError("SimParams: overflow_bound must be positive");
}

namespace {

// Integral over radii [a, b] of c(x, rho*dir) summed over the direction law.
// Requires a fixed direction list unless the jump is additive (case B), where
// a uniform-sphere law integrates to zero by symmetry.
Vec diffuse_jump_integral(const Model& model, const Vec& x, double a, double b) {
  const auto& df = *model.measure.diffuse;
  Vec total = Vec::Zero(model.m);
  if (df.radial.coef <= 0.0) return total;
  a = std::max(a, df.radial.lo);
  b = std::min(b, df.radial.hi);
  if (!(a < b)) return total;
  if (std::isinf(df.radial.moment(1.0, a, b)))
    throw ConfigError("jump compensator diverges over the requested shell");
  if (df.uniform_sphere) {
    if (model.jump_case != JumpCase::kB)
      throw ConfigError("state-dependent jump with a uniform-sphere law is not supported");
    return total;  // odd symmetry
  }
  if (model.jump_case == JumpCase::kB) {
    const double first_moment = df.radial.moment(1.0, a, b);
    for (const auto& dw : df.directions) total += dw.weight * first_moment * dw.dir;
    return total;
  }
  // Guard the quadrature away from a singular density at rho = 0; the skipped
  // head is O(a_eff^2 * g) and below tolerance for any integrable exponent.
  const double a_eff = (a <= 0.0 && df.radial.exponent < 0.0) ? 1e-10 : a;
  for (const auto& dw : df.directions) {
    for (int i = 0; i < model.m; ++i) {
      auto integrand = [&](double rho) {
        return model.jump(x, rho * dw.dir)[i] * df.radial.density(rho);
      };
      const double part = std::isinf(b) ? integrate_to_infinity(integrand, a_eff, 1e-10)
                                        : integrate_adaptive(integrand, a_eff, b, 1e-10);
      if (!std::isfinite(part))
        throw ConfigError("jump compensator quadrature failed to converge");
      total[i] += dw.weight * part;
    }
  }
  return total;
}

// Mean displacement of the jumps dropped below the sampling cutoff:
// integral of c(x,u) over {||u|| < eps}.
Vec small_jump_mean(const Model& model, const Vec& x, double eps) {
  Vec total = Vec::Zero(model.m);
  for (const auto& atom : model.measure.atoms)
    if (atom.mark.norm() < eps) total += atom.weight * model.jump(x, atom.mark);
  if (model.measure.diffuse) total += diffuse_jump_integral(model, x, 0.0, eps);
  return total;
}

void rk4_step(const FlowField& f, Vec& x, double h) {
  const Vec k1 = f(x);
  const Vec k2 = f(x + (0.5 * h) * k1);
  const Vec k3 = f(x + (0.5 * h) * k2);
  const Vec k4 = f(x + h * k3);
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double condition_estimate(const Mat& m, Eigen::JacobiSVD<Mat>& svd) {
  svd.compute(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smin <= 0.0) return kInf;
  return smax / smin;
}

}  // namespace

Vec jump_mean_shell(const Model& model, const Vec& x, double lo, double hi) {
  Vec total = Vec::Zero(model.m);
  if (lo > hi) return total;
  for (const auto& atom : model.measure.atoms) {
    const double norm = atom.mark.norm();
    if (norm >= lo && norm <= hi) total += atom.weight * model.jump(x, atom.mark);
  }
  if (model.measure.diffuse) total += diffuse_jump_integral(model, x, lo, hi);
  return total;
}

Vec effective_drift(const Model& model, const Vec& x, double truncation) {
  return model.drift(x) - jump_mean_shell(model, x, truncation, 1.0);
}

FlowField::FlowField(const Model& model, double truncation)
    : model_(&model), truncation_(truncation) {
  if (truncation <= 0.0 || model.measure.empty()) {
    constant_addback_ = true;
    cached_addback_ = Vec();
  } else if (model.jump_case == JumpCase::kB) {
    constant_addback_ = true;
    cached_addback_ = small_jump_mean(model, Vec::Zero(model.m), truncation);
    if (cached_addback_.norm() <= 0.0) cached_addback_ = Vec();
  }
}

Vec FlowField::operator()(const Vec& x) const {
  Vec a = model_->drift(x);
  if (constant_addback_) {
    if (cached_addback_.size() > 0) a += cached_addback_;
    return a;
  }
  return a + small_jump_mean(*model_, x, truncation_);
}

Vec integrate_flow(const FlowField& field, Vec x, double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw ConfigError("integrate_flow: dt must be positive");
  double t = t0;
  while (t < t1) {
    const double h = std::min(dt, t1 - t);
    if (!(h > 0.0)) break;
    rk4_step(field, x, h);
    t += h;
  }
  return x;
}

SimOutcome simulate(const Model& model, const Vec& x0, const SimParams& params, Rng& rng,
                    const std::function<void(double, const Vec&)>& on_state,
                    const std::function<void(const JumpRecord&)>& on_jump) {
  params.validate();
  if (static_cast<int>(x0.size()) != model.m)
    throw ConfigError("simulate: x0 dimension does not match the model");

  const PointMeasureRealization pts =
      sample_point_measure(model.measure, params.horizon, params.truncation, rng);
  const FlowField field(model, params.truncation);

  SimOutcome out;
  Vec x = x0;
  double t = 0.0;
  if (on_state) on_state(0.0, x);

  auto exploded = [&](double at) {
    if (x.allFinite() && x.norm() <= params.overflow_bound) return false;
    out.exploded = true;
    out.explosion_time = at;
    return true;
  };
  if (exploded(0.0)) {
    out.terminal = x;
    return out;
  }

  auto advance_to = [&](double target) {
    const double scale = std::max(1.0, target);
    while (t < target) {
      const double h = std::min(params.dt, target - t);
      if (!(h > 0.0)) break;
      rk4_step(field, x, h);
      t += h;
      if (t > target || target - t < 1e-15 * scale) t = target;
      if (on_state) on_state(t, x);
      if (exploded(t)) return false;
    }
    t = target;
    return true;
  };

  for (const auto& ev : pts.events) {
    if (!advance_to(ev.time)) {
      out.terminal = x;
      return out;
    }
    JumpRecord rec;
    rec.time = ev.time;
    rec.mark = ev.mark;
    rec.pre = x;
    rec.post = x + model.jump(x, ev.mark);
    x = rec.post;
    ++out.n_jumps;
    if (on_state) on_state(t, x);
    if (on_jump) on_jump(rec);
    if (exploded(t)) {
      out.terminal = x;
      return out;
    }
  }
  advance_to(params.horizon);
  out.terminal = x;
  return out;
}

Trajectory simulate_path(const Model& model, const Vec& x0, const SimParams& params, Rng& rng) {
  Trajectory traj;
  traj.x0 = x0;
  traj.truncation = params.truncation;
  auto on_state = [&](double t, const Vec& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
  };
  auto on_jump = [&](const JumpRecord& rec) {
    traj.jumps.push_back(rec);
    traj.jump_skeleton_index.push_back(traj.times.size() - 1);
  };
  const SimOutcome out = simulate(model, x0, params, rng, on_state, on_jump);
  traj.exploded = out.exploded;
  traj.explosion_time = out.explosion_time;
  return traj;
}

Vec delta(const Model& model, const Vec& x, const Vec& u) {
  if (model.jump_case == JumpCase::kB) return model.drift(x + u) - model.drift(x);
  const Vec c = model.jump(x, u);
  const Vec ax = effective_drift(model, x, model.delta_truncation);
  const Vec axc = effective_drift(model, x + c, model.delta_truncation);
  return axc - ax - model.jump_jacobian_x(x, u) * ax;
}

HatDelta hat_delta(const Model& model, const Vec& x, const Vec& u) {
  HatDelta out;
  if (model.jump_case == JumpCase::kB) {
    out.value = delta(model, x, u);
    return out;
  }
  const Mat m = Mat::Identity(model.m, model.m) + model.jump_jacobian_x(x, u);
  Eigen::JacobiSVD<Mat> svd;
  out.condition = condition_estimate(m, svd);
  if (!(out.condition < kCondCutoff)) {
    out.invertible = false;
    return out;
  }
  out.value = svd.solve(delta(model, x, u));
  return out;
}

double generator_apply(const Model& model, const std::function<double(const Vec&)>& f,
                       const std::function<Vec(const Vec&)>& grad_f, const Vec& x) {
  const Vec g = grad_f(x);
  const double fx = f(x);
  double total = g.dot(model.drift(x));

  for (const auto& atom : model.measure.atoms) {
    const Vec c = model.jump(x, atom.mark);
    double term = f(x + c) - fx;
    if (atom.mark.norm() <= 1.0) term -= g.dot(c);
    total += atom.weight * term;
  }

  if (model.measure.diffuse && model.measure.diffuse->radial.coef > 0.0) {
    const auto& df = *model.measure.diffuse;
    if (df.uniform_sphere)
      throw ConfigError("generator with a uniform-sphere diffuse law is not supported");
    // The compensated integrand is O(rho^2) at 0; skipping radii below the
    // guard keeps the quadrature finite and the remainder under tolerance.
    const double guard =
        (df.radial.lo <= 0.0) ? std::min(1e-8, 0.5 * df.radial.hi) : df.radial.lo;
    for (const auto& dw : df.directions) {
      auto piece = [&](double rho) {
        const Vec c = model.jump(x, rho * dw.dir);
        double term = f(x + c) - fx;
        if (rho <= 1.0) term -= g.dot(c);
        return term * df.radial.density(rho);
      };
      double part = 0.0;
      const double mid = std::min(std::max(1.0, guard), df.radial.hi);
      if (guard < mid) part += integrate_adaptive(piece, guard, mid, 1e-10);
      if (mid < df.radial.hi) {
        if (std::isinf(df.radial.hi)) {
          // The radial density is a pure power, so the tail integrand is
          // asymptotically a power of rho; rho*|piece(rho)| must decay or the
          // tail cannot converge. The variable substitution inside the
          // quadrature would otherwise map a divergent tail to a huge finite
          // value instead of infinity.
          const double base = std::max(mid, 1.0);
          double prev = kInf, last = 0.0;
          bool decaying = true;
          for (double factor : {1e3, 1e5, 1e7}) {
            last = std::abs(piece(base * factor)) * base * factor;
            if (!(last <= 0.5 * prev)) decaying = false;
            prev = last;
          }
          if (!decaying && last > 1e-10) throw NumericError("generator integral diverges");
          part += integrate_to_infinity(piece, mid, 1e-10);
        } else {
          part += integrate_adaptive(piece, mid, df.radial.hi, 1e-10);
        }
      }
      if (!std::isfinite(part)) throw NumericError("generator integral diverges");
      total += dw.weight * part;
    }
  }
  if (!std::isfinite(total)) throw NumericError("generator integral diverges");
  return total;
}

ExponentLog propagate_exponent(const Model& model, const Trajectory& traj) {
  if (traj.times.empty()) throw ConfigError("propagate_exponent: empty trajectory");
  const int m = model.m;
  const FlowField field(model, traj.truncation);

  ExponentLog log;
  log.times = traj.times;
  log.E0t.reserve(traj.times.size());
  log.at_jumps.reserve(traj.jumps.size());

  Mat E = Mat::Identity(m, m);
  log.E0t.push_back(E);
  std::size_t next_jump = 0;

  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double h = traj.times[i] - traj.times[i - 1];
    const bool is_jump_node = next_jump < traj.jump_skeleton_index.size() &&
                              traj.jump_skeleton_index[next_jump] == i;
    if (h > 0.0) {
      // One joint RK4 step for (x, E); x restarts from the stored node so the
      // stage states match the original integration.
      const Vec& xi = traj.states[i - 1];
      const Vec k1x = field(xi);
      const Mat k1e = model.drift_jacobian(xi) * E;
      const Vec x2 = xi + (0.5 * h) * k1x;
      const Vec k2x = field(x2);
      const Mat k2e = model.drift_jacobian(x2) * (E + (0.5 * h) * k1e);
      const Vec x3 = xi + (0.5 * h) * k2x;
      const Vec k3x = field(x3);
      const Mat k3e = model.drift_jacobian(x3) * (E + (0.5 * h) * k2e);
      const Vec x4 = xi + h * k3x;
      const Mat k4e = model.drift_jacobian(x4) * (E + h * k3e);
      E += (h / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
    }
    if (is_jump_node) {
      const JumpRecord& rec = traj.jumps[next_jump];
      ExponentPair pair;
      pair.pre = E;
      if (model.jump_case == JumpCase::kA)
        E = (Mat::Identity(m, m) + model.jump_jacobian_x(rec.pre, rec.mark)) * E;
      pair.post = E;
      log.at_jumps.push_back(pair);
      ++next_jump;
    }
    log.E0t.push_back(E);
  }
  return log;
}

InfluenceVectors jump_influence_vectors(const Model& model, const Trajectory& traj,
                                        const ExponentLog& log, double t) {
  if (log.times.empty() || t > log.times.back() + kNumericZero)
    throw ConfigError("jump_influence_vectors: t beyond the propagated horizon");
  std::size_t node = 0;
  for (std::size_t i = 0; i < log.times.size(); ++i)
    if (log.times[i] <= t) node = i;
  const Mat& Et = log.E0t[node];

  InfluenceVectors out;
  Eigen::JacobiSVD<Mat> svd;
  for (std::size_t j = 0; j < traj.jumps.size(); ++j) {
    const JumpRecord& rec = traj.jumps[j];
    if (!(rec.time < t)) break;
    const Mat& Etau = log.at_jumps[j].post;
    const double cond = condition_estimate(Etau, svd);
    if (!(cond < kCondCutoff)) {
      ++out.excluded_jump_count;
      continue;
    }
    out.vectors.push_back(Et * svd.solve(delta(model, rec.pre, rec.mark)));
  }
  return out;
}

}  // namespace jumplab
