#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/law.hpp"
#include "jumplab/sde.hpp"
#include "jumplab/stats.hpp"

namespace jumplab {

struct StopSpec {
  enum class Kind { kHorizon, kBallEntry };
  Kind kind = Kind::kHorizon;
  double radius = 0.0;       // ball ||x|| <= radius for kBallEntry
  double max_horizon = 1.0;  // hard cap for both kinds
};

struct PairedRun {
  Trajectory first;
  Trajectory second;
  bool both_entered = false;  // kBallEntry: both coordinates reached the ball
  double entry_time = kInf;   // the first such skeleton time
  bool horizon_exceeded = false;  // ball requested but cap hit first
};

// Two paths driven by independent realizations when y1 != y2, by one shared
// realization when y1 == y2, stepped on a common grid so simultaneous events
// are well defined.
PairedRun simple_coupling_run(const Model& model, const Vec& y1, const Vec& y2,
                              const StopSpec& stop, const SimParams& params, Rng& rng);

struct GluingResult {
  bool glued = false;
  Vec terminal1;
  Vec terminal2;
  double overlap = 0.0;  // binned overlap mass of the two estimated laws
};

// One window of the gluing construction: estimates the two time-T laws from
// n_aux auxiliary paths each, declares gluing with probability equal to their
// binned overlap (common point uniform in the selected cell), otherwise draws
// the terminals independently from the normalized residuals.
GluingResult gluing_attempt(const Model& model, const Vec& y1, const Vec& y2, double T,
                            std::uint64_t n_aux, const Binning& binning,
                            const SimParams& params, Rng& rng);

struct CouplingRecord {
  std::vector<double> Q_times;
  std::vector<std::string> phases;  // "free" / "gluing", closed by "glued" on success
  bool glued = false;
  double Q_star = kInf;  // gluing moment; kInf = not glued within max_cycles
  std::uint64_t cycles = 0;
  bool exploded = false;
  bool free_phase_capped = false;  // a free phase hit params.horizon before the ball
};

/// Alternating scheme: free phase until both coordinates enter the R-ball
// (each free phase capped at params.horizon), then a gluing window of length
// T, repeated up to max_cycles. Coordinates are compared at every Q_k; once
// glued they stay glued.
CouplingRecord switching_coupling(const Model& model, const Vec& start1, const Vec& start2,
                                  double R, double T, std::uint64_t max_cycles,
                                  std::uint64_t n_aux, const Binning& binning,
                                  const SimParams& params, Rng& rng);
CouplingRecord switching_coupling(const Model& model, const EmpiricalLaw& mu1,
                                  const EmpiricalLaw& mu2, double R, double T,
                                  std::uint64_t max_cycles, std::uint64_t n_aux,
                                  const Binning& binning, const SimParams& params, Rng& rng);

struct SwitchingSample {
  Vec x1;
  Vec x2;
  bool glued = false;
  double Q_star = kInf;
  bool exploded = false;
};

// Runs the alternating scheme to a fixed total horizon and returns both
// coordinates at that horizon; phases are truncated so the elapsed time is
// exactly `horizon`. Each coordinate keeps the marginal law of a direct
// simulation from its start, which is what the fidelity tests check.
SwitchingSample switching_marginal_sample(const Model& model, const Vec& start1,
                                          const Vec& start2, double R, double T,
                                          double horizon, std::uint64_t n_aux,
                                          const Binning& binning, const SimParams& params,
                                          Rng& rng);

struct ExpFit {
  double prefactor = 0.0;
  double rate = 0.0;
  LineFit line;
};

// Least-squares fit values ~ prefactor * exp(-rate * t); values must be
// positive.
ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& values);

struct TvPoint {
  double t = 0.0;
  double tv = 0.0;
  double noise_floor = 0.0;  // bootstrap scale of the histogram noise at this t
};

struct TvCurve {
  std::vector<TvPoint> points;
  bool resolvable = false;  // some point exceeded 3x its noise floor
  double C1_emp = 0.0;
  double C2_emp = 0.0;
  LineFit fit;                     // of log tv against t over the used points
  std::vector<double> fit_times;   // points that entered the fit
};

// d_TV(P_x^t, P_y^t) over the time grid with a bootstrap noise floor
// (200 resamples per point); the exponential fit uses only points above
// 3x their floor. resolvable = false means decay faster than the Monte Carlo
// resolution.
TvCurve tv_decay_curve(const Model& model, const Vec& x, const Vec& y,
                       const std::vector<double>& t_grid, const SimParams& params,
                       const Binning& binning);

// Sojourn-time-weighted occupation histogram over [0, horizon] (trapezoid
// weights at skeleton nodes); exploded paths assign their remaining time to
// the out-of-range cell.
EmpiricalLaw khasminskii_average(const Model& model, const Vec& start, double horizon,
                                 const SimParams& params, const Binning& binning);
EmpiricalLaw khasminskii_average(const Model& model, const EmpiricalLaw& start, double horizon,
                                 const SimParams& params, const Binning& binning);

struct RateBound {
  double D = 0.0;
  double p = 1.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C1_tilde = 0.0;
  bool conservative_bracket = true;  // 1/4 exponent variant; see the report note
};

// Explicit rate constants:
//   D  = (1-c)/2 * T + ln(4*gamma/alpha + 4*sup_phi)
//   p  = max(1, -2D / ln(1-delta))
//   C2 = (1-c) / (4p)
//   C1 = 2 * max(gamma/alpha, 1) * 2 * exp((1-c)T/2) / (1 - (1-delta)^{1/4})
// The bracket exponent has two published variants (1/4 and 1/2); the larger
// 1/4 constant is used and flagged.
RateBound theoretical_rate_bound(double alpha, double gamma, double c, double T,
                                 double delta, double sup_phi);

struct TailPoint {
  double t = 0.0;
  double tail = 0.0;  // empirical P(Q* > t)
  std::uint64_t n = 0;
};

std::vector<TailPoint> beta_mixing_tail(const std::vector<CouplingRecord>& records,
                                        const std::vector<double>& t_grid);

// Minimal binned overlap of the time-T laws over start pairs drawn from a
// deterministic grid in the R-ball: the coupling parameter delta(T, R).
double measure_delta(const Model& model, double T, double R, const SimParams& params,
                     const Binning& binning);

}  // namespace jumplab
