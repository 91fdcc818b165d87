#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

struct SimParams {
  double dt = 0.01;
  double horizon = 1.0;
  double truncation = 0.0;
  std::uint64_t seed = 1;
  std::uint64_t n_paths = 1;
  int workers = 1;
  double overflow_bound = kOverflowBound;

  void validate() const;
};

struct JumpRecord {
  double time = 0.0;
  Vec mark;
  Vec pre;
  Vec post;  // pre + c(pre, mark), exactly
};

struct Trajectory {
  Vec x0;
  double truncation = 0.0;     // jump-size cutoff the path was simulated with
  std::vector<double> times;   // skeleton: integrator steps and jump times
  std::vector<Vec> states;     // states[i] at times[i]; post-jump value at jump nodes
  std::vector<JumpRecord> jumps;
  std::vector<std::size_t> jump_skeleton_index;  // skeleton node of each jump
  bool exploded = false;
  double explosion_time = kInf;

  const Vec& terminal() const { return states.back(); }
};

struct ExponentPair {
  Mat pre;   // E_0^{tau-}
  Mat post;  // E_0^{tau} = (I + grad_x c(pre, u))·E_0^{tau-}
};

struct ExponentLog {
  std::vector<double> times;  // mirrors Trajectory::times
  std::vector<Mat> E0t;
  std::vector<ExponentPair> at_jumps;  // one per trajectory jump
};

// Between-jump drift field: the registered drift plus the mean of the jump
// mass dropped below the truncation. State-independent parts are cached.
class FlowField {
 public:
  FlowField(const Model& model, double truncation);
  Vec operator()(const Vec& x) const;

 private:
  const Model* model_;
  double truncation_;
  bool constant_addback_ = false;
  Vec cached_addback_;
};

// Mean jump displacement over the closed norm shell [lo, hi]:
// integral of c(x,u) over {lo <= ||u|| <= hi} against the measure.
// Throws ConfigError when the integral diverges.
Vec jump_mean_shell(const Model& model, const Vec& x, double lo, double hi);

// Diagnostic compensated drift a(x) - integral of c(x,u) over
// {truncation <= ||u|| <= 1}.
Vec effective_drift(const Model& model, const Vec& x, double truncation);

// RK4 advance of the between-jump field from t0 to t1 (no jumps), stepping at
// most dt at a time.
Vec integrate_flow(const FlowField& field, Vec x, double t0, double t1, double dt);

inline Vec apply_jump(const Model& model, const Vec& x, const Vec& mark) {
  return x + model.jump(x, mark);
}

struct SimOutcome {
  Vec terminal;
  bool exploded = false;
  double explosion_time = kInf;
  std::uint64_t n_jumps = 0;
};

// Core jump-adapted integration: RK4 between the sampled jump times, exact
// jump application at each. Observers (either may be empty) receive the state
// at t = 0, after every step, and after every jump. Integration stops with the
// exploded flag set once the state norm passes params.overflow_bound.
SimOutcome simulate(const Model& model, const Vec& x0, const SimParams& params, Rng& rng,
                    const std::function<void(double, const Vec&)>& on_state = {},
                    const std::function<void(const JumpRecord&)>& on_jump = {});

Trajectory simulate_path(const Model& model, const Vec& x0, const SimParams& params, Rng& rng);

// Jump response of the drift: case B a(x+u) - a(x); case A
// [ã(x+c(x,u)) - ã(x)] - [grad_x c(x,u)]·ã(x) with ã taken at
// model.delta_truncation.
Vec delta(const Model& model, const Vec& x, const Vec& u);

struct HatDelta {
  bool invertible = true;
  Vec value;              // (I + grad_x c(x,u))^{-1} delta(x,u) when invertible
  double condition = 1.0; // spectral condition estimate of I + grad_x c
};

HatDelta hat_delta(const Model& model, const Vec& x, const Vec& u);

// Extended generator (grad f, a) + integral of
// [f(x + c(x,u)) - f(x) - (grad f(x), c(x,u))·1{||u|| <= 1}] against the measure.
// Throws NumericError when the integral diverges.
double generator_apply(const Model& model, const std::function<double(const Vec&)>& f,
                       const std::function<Vec(const Vec&)>& grad_f, const Vec& x);

// Solves E' = grad a(X(t))·E along the trajectory skeleton, left-multiplying
// by I + grad_x c at jumps; E_0^0 = I.
ExponentLog propagate_exponent(const Model& model, const Trajectory& traj);

struct InfluenceVectors {
  std::vector<Vec> vectors;  // E_0^t (E_0^tau)^{-1} delta(pre, mark) per jump before t
  std::uint64_t excluded_jump_count = 0;  // jumps skipped for ill-conditioned E_0^tau
};

InfluenceVectors jump_influence_vectors(const Model& model, const Trajectory& traj,
                                        const ExponentLog& log, double t);

}  // namespace jumplab
