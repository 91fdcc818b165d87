#include "jumplab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "jumplab/engine.hpp"

namespace jumplab {

namespace {

void require_p(double p, const char* who) {
  if (!(p > 0.0 && p < 1.0 / 6.0))
    throw ConfigError(std::string(who) + ": requires 0 < p < 1/6");
}

}  // namespace

CircleState make_circle_state(const BigInt& num, const BigInt& den) {
  if (den <= 0) throw ConfigError("make_circle_state: denominator must be positive");
  if (num < 0) throw ConfigError("make_circle_state: numerator must be nonnegative");
  CircleState z;
  z.num = num % den;
  z.den = den;
  const BigInt g = boost::multiprecision::gcd(z.num, z.den);
  if (g > 1) {
    z.num /= g;
    z.den /= g;
  }
  return z;
}

CircleState circle_step(const CircleState& z, double p, Rng& rng) {
  require_p(p, "circle_step");
  // Branch order is fixed; coinciding atoms merge into the first occurrence.
  const CircleState candidates[4] = {
      make_circle_state(3 * z.num, z.den),
      make_circle_state(z.num, 3 * z.den),
      make_circle_state(z.num + z.den, 3 * z.den),
      make_circle_state(z.num + 2 * z.den, 3 * z.den),
  };
  const double probs[4] = {1.0 - 3.0 * p, p, p, p};

  CircleState atoms[4];
  double mass[4];
  int n_atoms = 0;
  for (int i = 0; i < 4; ++i) {
    int found = -1;
    for (int j = 0; j < n_atoms; ++j)
      if (atoms[j] == candidates[i]) {
        found = j;
        break;
      }
    if (found >= 0) {
      mass[found] += probs[i];
    } else {
      atoms[n_atoms] = candidates[i];
      mass[n_atoms] = probs[i];
      ++n_atoms;
    }
  }
  const double u = rng.uniform01();
  double acc = 0.0;
  for (int j = 0; j < n_atoms; ++j) {
    acc += mass[j];
    if (u < acc) return atoms[j];
  }
  return atoms[n_atoms - 1];
}

namespace {

BigInt strip_threes(BigInt den) {
  while (den % 3 == 0) den /= 3;
  return den;
}

}  // namespace

bool denominator_power_of_3(const CircleState& z) { return strip_threes(z.den) == 1; }

bool denominator_twice_power_of_3(const CircleState& z) { return strip_threes(z.den) == 2; }

Example53Report run_example_5_3(double p, std::uint64_t n_steps, std::uint64_t n_paths,
                                std::uint64_t bd_steps, std::uint64_t seed) {
  require_p(p, "run_example_5_3");
  if (n_steps < 1 || n_paths < 1 || bd_steps < 1)
    throw ConfigError("run_example_5_3: step and path counts must be positive");

  Example53Report report;
  report.p = p;

  std::map<CircleState, std::uint64_t> occ0, occ_half;
  auto run_chain = [&](const CircleState& start, std::uint64_t stream_base,
                       std::map<CircleState, std::uint64_t>& occ, bool from_zero) {
    for (std::uint64_t i = 0; i < n_paths; ++i) {
      Rng rng(seed, stream::kGallery, stream_base + i);
      CircleState z = start;
      ++occ[z];
      for (std::uint64_t s = 0; s < n_steps; ++s) {
        z = circle_step(z, p, rng);
        const bool ok = from_zero ? denominator_power_of_3(z) : denominator_twice_power_of_3(z);
        if (!ok)
          throw NumericError("run_example_5_3: visited state left its denominator class");
        ++occ[z];
      }
    }
  };
  run_chain(make_circle_state(0, 1), 0, occ0, true);
  run_chain(make_circle_state(1, 2), n_paths, occ_half, false);

  // Total-variation distance between the occupation laws, exact in integers.
  const std::uint64_t total = n_paths * (n_steps + 1);
  std::uint64_t abs_sum = 0;
  for (const auto& [state, count] : occ0) {
    const auto it = occ_half.find(state);
    const std::uint64_t other = it == occ_half.end() ? 0 : it->second;
    if (other > 0) report.support_collision = true;
    abs_sum += count > other ? count - other : other - count;
  }
  for (const auto& [state, count] : occ_half)
    if (occ0.find(state) == occ0.end()) abs_sum += count;
  report.tv_occupation = static_cast<double>(abs_sum) / static_cast<double>(2 * total);
  report.circle_states_seen = occ0.size() + occ_half.size();
  report.pass_tv = report.tv_occupation == 1.0 && !report.support_collision;

  // Birth-death companion: up with probability b, down-or-stick otherwise.
  const double b = 3.0 * p;
  const double d = 1.0 - 3.0 * p;
  report.r = b / d;
  report.bd_steps = bd_steps;
  report.bd_thin_stride = 20;
  Rng bd_rng(seed, stream::kGallery, 2 * n_paths);
  std::uint64_t level = 0;
  std::uint64_t births = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_thin = 0;
  for (std::uint64_t s = 1; s <= bd_steps; ++s) {
    if (bd_rng.uniform01() < b) {
      ++level;
      ++births;
    } else if (level > 0) {
      --level;
    }
    if (s % report.bd_thin_stride == 0) {
      if (level >= counts.size()) counts.resize(level + 1, 0);
      ++counts[level];
      ++n_thin;
    }
  }
  report.bd_observed = counts;
  report.bd_observed.push_back(0);  // tail cell beyond the highest visited level
  report.bd_expected.resize(counts.size() + 1);
  double tail = static_cast<double>(n_thin);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    report.bd_expected[k] =
        static_cast<double>(n_thin) * (1.0 - report.r) * std::pow(report.r, static_cast<double>(k));
    tail -= report.bd_expected[k];
  }
  report.bd_expected.back() = std::max(tail, 0.0);
  std::vector<double> observed(report.bd_observed.begin(), report.bd_observed.end());
  report.chi_square = chi_square_gof(observed, report.bd_expected);
  report.pass_chi = report.chi_square.p_value > 0.01;

  report.up_freq = static_cast<double>(births) / static_cast<double>(bd_steps);
  report.up_freq_expected = b;
  report.up_freq_band = 3.0 * std::sqrt(b * d / static_cast<double>(bd_steps));
  report.pass_up_freq = std::abs(report.up_freq - b) <= report.up_freq_band;
  return report;
}

Example51Report run_example_5_1(double c, double horizon, const SimParams& params) {
  params.validate();
  if (!(horizon > 2.0 * params.dt))
    throw ConfigError("run_example_5_1: horizon too short for the slope window");
  const Model model = make_model("example_5_1", {{"c", {c}}}, LevyMeasure{});

  Example51Report report;
  report.c = c;
  report.horizon = horizon;
  report.n_paths = params.n_paths;
  report.slope_target = 1.0 - c;

  SimParams run = params;
  run.horizon = horizon;
  const Vec x0 = scalar_vec(5.0);
  const double t_half = 0.5 * horizon;

  struct Slot {
    double slope = 0.0;
    double min_x = 0.0;
    bool exploded = false;
  };
  std::vector<Slot> slots(params.n_paths);
  for_each_path(params.n_paths, params.workers, [&](std::uint64_t i) {
    Rng rng(params.seed, stream::kGallery, i);
    double min_x = x0[0];
    double t_mid = 0.0, x_mid = x0[0];
    bool have_mid = false;
    auto observe = [&](double t, const Vec& xs) {
      min_x = std::min(min_x, xs[0]);
      if (!have_mid && t >= t_half) {
        t_mid = t;
        x_mid = xs[0];
        have_mid = true;
      }
    };
    const SimOutcome out = simulate(model, x0, run, rng, observe);
    slots[i].exploded = out.exploded;
    slots[i].min_x = min_x;
    if (!out.exploded && have_mid)
      slots[i].slope = (out.terminal[0] - x_mid) / (horizon - t_mid);
    else
      slots[i].exploded = true;
  });

  std::vector<double> slopes;
  for (const Slot& s : slots) {
    report.minima.push_back(s.min_x);
    if (s.exploded) {
      ++report.exploded;
      continue;
    }
    slopes.push_back(s.slope);
    report.slopes.push_back(s.slope);
    if (s.min_x > 1.0) ++report.escaped;
  }
  if (slopes.empty()) throw NumericError("run_example_5_1: every path exploded");

  const SampleMoments m = sample_moments(slopes);
  report.slope_mean = m.mean;
  report.slope_se = std::sqrt(m.variance / static_cast<double>(slopes.size()));
  const std::uint64_t n_used = slopes.size();
  report.escape_fraction = static_cast<double>(report.escaped) / static_cast<double>(n_used);
  report.escape_wilson = wilson_interval(report.escaped, n_used);
  report.pass_slope = std::abs(report.slope_mean - report.slope_target) <= 0.05;
  report.pass_escape = report.escape_wilson.lo > 0.0;
  return report;
}

Example52Report run_example_5_2(double horizon, const SimParams& params,
                                const Binning& binning) {
  params.validate();
  binning.validate();
  if (!(horizon > 0.0)) throw ConfigError("run_example_5_2: horizon must be positive");
  const Model model = make_model("example_5_2", {}, LevyMeasure{});

  Example52Report report;
  report.horizon = horizon;
  report.n_paths = params.n_paths;

  SimParams run = params;
  run.horizon = horizon;
  auto count_exits = [&](double start, std::uint64_t stream_base, bool positive_side) {
    std::vector<std::uint8_t> exited(params.n_paths, 0);
    for_each_path(params.n_paths, params.workers, [&](std::uint64_t i) {
      Rng rng(params.seed, stream::kGallery, stream_base + i);
      bool exit_seen = false;
      auto observe = [&](double, const Vec& xs) {
        if (positive_side ? xs[0] < 1.0 : xs[0] > -1.0) exit_seen = true;
      };
      const SimOutcome out = simulate(model, scalar_vec(start), run, rng, observe);
      exited[i] = (exit_seen || out.exploded) ? 1 : 0;
    });
    std::uint64_t n = 0;
    for (std::uint8_t e : exited) n += e;
    return n;
  };
  report.exits_plus = count_exits(2.0, 0, true);
  report.exits_minus = count_exits(-2.0, params.n_paths, false);

  const EmpiricalLaw avg_plus = khasminskii_average(model, scalar_vec(2.0), horizon, params, binning);
  const EmpiricalLaw avg_minus =
      khasminskii_average(model, scalar_vec(-2.0), horizon, params, binning);
  report.tv_between_averages = tv_distance(avg_plus, avg_minus);
  report.pass = report.exits_plus == 0 && report.exits_minus == 0 &&
                report.tv_between_averages >= 1.0 - 1e-12;
  return report;
}

Prop01Report run_prop_0_1(const Model& model, const Prop01Options& opts,
                          const SimParams& params) {
  params.validate();
  if (model.m != 1) throw ConfigError("run_prop_0_1: requires a scalar model");

  Prop01Options o = opts;
  if (o.x_a.size() == 0) o.x_a = scalar_vec(0.0);
  if (o.x_b.size() == 0) o.x_b = scalar_vec(5.0);
  if (o.binning.cells.empty()) o.binning = Binning::regular_1d(-2.0, 8.0, 200);
  if (o.q_list.empty()) throw ConfigError("run_prop_0_1: q list must be nonempty");
  for (double q : o.q_list)
    if (!(q > 0.0)) throw ConfigError("run_prop_0_1: q must be positive");

  const double base = std::max(8.0, 2.0 * std::max(o.x_a.norm(), o.x_b.norm()));
  for (double radius : {base, 2.0 * base, 4.0 * base})
    for (double sign : {-1.0, 1.0}) {
      const double x = sign * radius;
      if (!(model.drift(scalar_vec(x))[0] * x < 0.0))
        throw ConfigError("run_prop_0_1: drift must point inward on the far ring");
    }

  Prop01Report report;
  for (double q : o.q_list) {
    const double moment = tail_moment(model.measure, q);
    report.tail_moments.emplace_back(q, moment);
    if (std::isfinite(moment)) report.cond_tail_moment = true;
  }
  if (!report.cond_tail_moment)
    report.violations.push_back(
        "condition (i): no listed q gives a finite tail moment of the jump measure");

  double mass = 0.0;
  for (const Atom& atom : model.measure.atoms) mass += atom.weight;
  if (model.measure.diffuse) {
    const auto& df = *model.measure.diffuse;
    mass += df.radial.mass(df.radial.lo, df.radial.hi) * df.direction_weight_sum();
  }
  report.cond_nonzero_measure = mass > 0.0;
  if (!report.cond_nonzero_measure)
    report.violations.push_back("condition (ii): the jump measure has zero mass");

  report.ran_mc = report.violations.empty();
  if (!report.ran_mc) return report;

  report.curve = tv_decay_curve(model, o.x_a, o.x_b, o.t_grid, params, o.binning);
  report.tv_final = report.curve.points.back().tv;
  report.occupation = khasminskii_average(model, o.x_a, o.avg_horizon, params, o.binning);
  report.mean = law_mean(report.occupation, 0);
  report.variance = law_variance(report.occupation, 0);
  return report;
}

}  // namespace jumplab
