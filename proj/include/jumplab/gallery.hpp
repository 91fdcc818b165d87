#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jumplab/coupling.hpp"
#include "jumplab/law.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/sde.hpp"
#include "jumplab/stats.hpp"

namespace jumplab {

using BigInt = boost::multiprecision::cpp_int;

// Point on the unit circle, z = num/den in [0,1), kept as a reduced exact
// rational: 0 <= num < den, gcd(num, den) = 1.
struct CircleState {
  BigInt num;
  BigInt den;

  bool operator==(const CircleState& other) const {
    return num == other.num && den == other.den;
  }
  bool operator<(const CircleState& other) const {
    if (den != other.den) return den < other.den;
    return num < other.num;
  }
};

// Reduces num/den modulo 1; den must be positive.
CircleState make_circle_state(const BigInt& num, const BigInt& den);

// One step of the four-atom kernel: 3z with probability 1 - 3p, and
// (z + k)/3 for k in {0,1,2} with probability p each, all modulo 1.
// Coinciding atoms merge their masses before the draw.
CircleState circle_step(const CircleState& z, double p, Rng& rng);

// Reduced-denominator classes preserved by the kernel.
bool denominator_power_of_3(const CircleState& z);
bool denominator_twice_power_of_3(const CircleState& z);

struct Example53Report {
  double p = 0.0;
  // Circle chains from 0 and from 1/2.
  double tv_occupation = 0.0;  // exactly 1 when the two supports never collide
  bool support_collision = false;
  std::uint64_t circle_states_seen = 0;
  // Birth-death companion: up-probability b = 3p, down d = 1 - 3p.
  double r = 0.0;  // b / d
  std::uint64_t bd_steps = 0;
  std::uint64_t bd_thin_stride = 0;
  ChiSquareResult chi_square;
  double up_freq = 0.0;
  double up_freq_expected = 0.0;
  double up_freq_band = 0.0;  // three binomial sigmas
  std::vector<std::uint64_t> bd_observed;  // thinned occupancy by level
  std::vector<double> bd_expected;         // geometric prediction, same levels
  bool pass_tv = false;
  bool pass_chi = false;
  bool pass_up_freq = false;
};

// Runs both circle chains (n_paths each, n_steps transitions) with exact
// rational arithmetic, asserting the denominator class of every visited
// state, plus the birth-death companion chain for bd_steps transitions.
Example53Report run_example_5_3(double p, std::uint64_t n_steps, std::uint64_t n_paths,
                                std::uint64_t bd_steps, std::uint64_t seed);

struct Example51Report {
  double c = 0.0;
  double horizon = 0.0;
  std::uint64_t n_paths = 0;
  double slope_mean = 0.0;
  double slope_se = 0.0;
  double slope_target = 0.0;  // 1 - c
  std::uint64_t escaped = 0;  // paths whose running minimum stayed above 1
  double escape_fraction = 0.0;
  Interval escape_wilson;
  std::uint64_t exploded = 0;
  std::vector<double> slopes;
  std::vector<double> minima;
  bool pass_slope = false;   // |slope_mean - slope_target| <= 0.05
  bool pass_escape = false;  // Wilson lower bound > 0
};

// Transient linear growth of the no-invariant-measure example: paths from
// x0 = 5, slope estimated over the second half of the horizon.
Example51Report run_example_5_1(double c, double horizon, const SimParams& params);

struct Example52Report {
  double horizon = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t exits_plus = 0;   // paths from +2 ever dipping below +1
  std::uint64_t exits_minus = 0;  // paths from -2 ever rising above -1
  double tv_between_averages = 0.0;
  bool pass = false;
};

// Two-invariant-measure example: both half-lines are absorbing and their
// occupation averages have disjoint supports.
Example52Report run_example_5_2(double horizon, const SimParams& params,
                                const Binning& binning);

struct Prop01Options {
  std::vector<double> q_list{1.0};
  Vec x_a;
  Vec x_b;
  std::vector<double> t_grid{1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0};
  Binning binning;
  double avg_horizon = 200.0;
};

struct Prop01Report {
  std::vector<std::pair<double, double>> tail_moments;  // (q, moment value)
  bool cond_tail_moment = false;     // finite for some listed q
  bool cond_nonzero_measure = false;
  std::vector<std::string> violations;
  bool ran_mc = false;
  TvCurve curve;
  double tv_final = 0.0;
  EmpiricalLaw occupation;
  double mean = 0.0;
  double variance = 0.0;
};

// Exponential-ergodicity scenario: verifies the two measure conditions,
// measures the TV decay between two starts, and summarizes the occupation
// law. Requires m = 1 and drift pointing inward on the far ring.
Prop01Report run_prop_0_1(const Model& model, const Prop01Options& opts,
                          const SimParams& params);

}  // namespace jumplab
