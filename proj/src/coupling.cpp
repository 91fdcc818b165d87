#include "jumplab/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "jumplab/conditions.hpp"
#include "jumplab/engine.hpp"

namespace jumplab {

namespace {

void push_node(Trajectory& traj, double t, const Vec& x) {
  traj.times.push_back(t);
  traj.states.push_back(x);
}

void push_jump(Trajectory& traj, const JumpRecord& rec) {
  traj.jumps.push_back(rec);
  traj.jump_skeleton_index.push_back(traj.times.size() - 1);
}

// One coordinate of a horizon-stopped pair, integrated on its own event/grid
// partition. The stepping must mirror simulate() exactly — same step-size
// choice, same end-of-interval snapping — so that the coordinate is
// numerically indistinguishable from a direct single-path run driven by the
// same point measure. In particular the zero-jump flow value agrees bit for
// bit; breaking the partition at the other coordinate's event times would
// displace it by the change in accumulated integrator bias, which is enough
// to separate the terminal laws' atoms.
void integrate_own_partition(const Model& model, const FlowField& field,
                             const PointMeasureRealization& pts, const Vec& x0,
                             double cap, const SimParams& params, Trajectory& traj) {
  Vec x = x0;
  double t = 0.0;
  push_node(traj, 0.0, x);

  auto exploded = [&](double at) {
    if (x.allFinite() && x.norm() <= params.overflow_bound) return false;
    traj.exploded = true;
    traj.explosion_time = at;
    return true;
  };
  if (exploded(0.0)) return;

  auto advance_to = [&](double target) {
    const double scale = std::max(1.0, target);
    while (t < target) {
      const double h = std::min(params.dt, target - t);
      if (!(h > 0.0)) break;
      const Vec k1 = field(x);
      const Vec k2 = field(x + (0.5 * h) * k1);
      const Vec k3 = field(x + (0.5 * h) * k2);
      const Vec k4 = field(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
      if (t > target || target - t < 1e-15 * scale) t = target;
      push_node(traj, t, x);
      if (exploded(t)) return false;
    }
    t = target;
    return true;
  };

  for (const auto& ev : pts.events) {
    if (!advance_to(ev.time)) return;
    JumpRecord rec{ev.time, ev.mark, x, x + model.jump(x, ev.mark)};
    x = rec.post;
    push_node(traj, t, x);
    push_jump(traj, rec);
    if (exploded(t)) return;
  }
  advance_to(cap);
}

}  // namespace

PairedRun simple_coupling_run(const Model& model, const Vec& y1, const Vec& y2,
                              const StopSpec& stop, const SimParams& params, Rng& rng) {
  params.validate();
  if (!(stop.max_horizon > 0.0)) throw ConfigError("simple_coupling_run: max_horizon must be positive");
  if (stop.kind == StopSpec::Kind::kBallEntry && !(stop.radius > 0.0))
    throw ConfigError("simple_coupling_run: ball radius must be positive");
  if (static_cast<int>(y1.size()) != model.m || static_cast<int>(y2.size()) != model.m)
    throw ConfigError("simple_coupling_run: start dimension mismatch");

  const bool shared = (y1 - y2).norm() == 0.0;
  const double cap = stop.max_horizon;
  const PointMeasureRealization r1 =
      sample_point_measure(model.measure, cap, params.truncation, rng);
  const PointMeasureRealization r2 =
      shared ? r1 : sample_point_measure(model.measure, cap, params.truncation, rng);

  // A horizon-stopped pair with distinct driving measures has no joint
  // stopping rule, so the coordinates evolve independently and each one is
  // integrated on its own partition, exactly as a direct single-path run
  // would be. Only ball-entry runs (which stop on a joint condition) and
  // shared realizations use the merged event grid below.
  if (stop.kind == StopSpec::Kind::kHorizon && !shared) {
    const FlowField field(model, params.truncation);
    PairedRun run;
    run.first.x0 = y1;
    run.first.truncation = params.truncation;
    run.second.x0 = y2;
    run.second.truncation = params.truncation;
    integrate_own_partition(model, field, r1, y1, cap, params, run.first);
    integrate_own_partition(model, field, r2, y2, cap, params, run.second);
    return run;
  }

  // Merged event list; which = 0 drives both coordinates (shared realization).
  struct Ev {
    double time;
    int which;
    const Vec* mark;
  };
  std::vector<Ev> evs;
  evs.reserve(r1.events.size() + (shared ? 0 : r2.events.size()));
  for (const auto& e : r1.events) evs.push_back({e.time, shared ? 0 : 1, &e.mark});
  if (!shared)
    for (const auto& e : r2.events) evs.push_back({e.time, 2, &e.mark});
  std::stable_sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.which < b.which;
  });

  const FlowField field(model, params.truncation);
  PairedRun run;
  run.first.x0 = y1;
  run.first.truncation = params.truncation;
  run.second.x0 = y2;
  run.second.truncation = params.truncation;

  Vec x1 = y1, x2 = y2;
  double t = 0.0;
  bool done = false;

  auto check_state = [&](double at) {
    if (!x1.allFinite() || x1.norm() > params.overflow_bound) {
      run.first.exploded = true;
      run.first.explosion_time = at;
      done = true;
    }
    if (!x2.allFinite() || x2.norm() > params.overflow_bound) {
      run.second.exploded = true;
      run.second.explosion_time = at;
      done = true;
    }
    if (!done && stop.kind == StopSpec::Kind::kBallEntry && !run.both_entered &&
        x1.norm() <= stop.radius && x2.norm() <= stop.radius) {
      run.both_entered = true;
      run.entry_time = at;
      done = true;
    }
  };

  push_node(run.first, 0.0, x1);
  push_node(run.second, 0.0, x2);
  check_state(0.0);

  auto rk4_both = [&](double h) {
    auto step_one = [&](Vec& x) {
      const Vec k1 = field(x);
      const Vec k2 = field(x + (0.5 * h) * k1);
      const Vec k3 = field(x + (0.5 * h) * k2);
      const Vec k4 = field(x + h * k3);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };
    step_one(x1);
    step_one(x2);
  };

  auto advance_to = [&](double target) {
    const double scale = std::max(1.0, target);
    while (!done && t < target) {
      const double h = std::min(params.dt, target - t);
      if (!(h > 0.0)) break;
      rk4_both(h);
      t += h;
      if (t > target || target - t < 1e-15 * scale) t = target;
      push_node(run.first, t, x1);
      push_node(run.second, t, x2);
      check_state(t);
    }
    if (!done) t = target;
  };

  for (const auto& ev : evs) {
    advance_to(ev.time);
    if (done) break;
    if (ev.which == 0 || ev.which == 1) {
      JumpRecord rec{ev.time, *ev.mark, x1, x1 + model.jump(x1, *ev.mark)};
      x1 = rec.post;
      push_node(run.first, t, x1);
      push_jump(run.first, rec);
    }
    if (ev.which == 0 || ev.which == 2) {
      JumpRecord rec{ev.time, *ev.mark, x2, x2 + model.jump(x2, *ev.mark)};
      x2 = rec.post;
      push_node(run.second, t, x2);
      push_jump(run.second, rec);
    }
    // Keep the two skeletons on a common time set.
    if (run.first.times.size() < run.second.times.size()) push_node(run.first, t, x1);
    if (run.second.times.size() < run.first.times.size()) push_node(run.second, t, x2);
    check_state(t);
    if (done) break;
  }
  if (!done) advance_to(cap);

  if (stop.kind == StopSpec::Kind::kBallEntry && !run.both_entered)
    run.horizon_exceeded = !run.first.exploded && !run.second.exploded;
  return run;
}

GluingResult gluing_attempt(const Model& model, const Vec& y1, const Vec& y2, double T,
                            std::uint64_t n_aux, const Binning& binning,
                            const SimParams& params, Rng& rng) {
  if (!(T > 0.0)) throw ConfigError("gluing_attempt: window must be positive");
  if (n_aux < 1) throw ConfigError("gluing_attempt: n_aux must be positive");
  binning.validate();

  SimParams run = params;
  run.horizon = T;

  GluingResult out;
  if ((y1 - y2).norm() == 0.0) {
    const SimOutcome o = simulate(model, y1, run, rng);
    out.glued = true;
    out.overlap = 1.0;
    out.terminal1 = out.terminal2 = o.terminal;
    return out;
  }

  const std::size_t n_cells = binning.cell_count();
  const std::size_t out_cell = binning.out_index();
  std::vector<std::uint64_t> count1(n_cells + 1, 0), count2(n_cells + 1, 0);
  std::vector<Vec> outliers1, outliers2;
  auto draw_ensemble = [&](const Vec& start, std::vector<std::uint64_t>& counts,
                           std::vector<Vec>& outliers) {
    for (std::uint64_t i = 0; i < n_aux; ++i) {
      const SimOutcome o = simulate(model, start, run, rng);
      const std::size_t cell = o.exploded ? out_cell : binning.flat_index(o.terminal);
      ++counts[cell];
      if (cell == out_cell) outliers.push_back(o.terminal);
    }
  };
  draw_ensemble(y1, count1, outliers1);
  draw_ensemble(y2, count2, outliers2);

  std::uint64_t min_total = 0;
  std::vector<std::uint64_t> min_count(n_cells + 1, 0);
  for (std::size_t c = 0; c <= n_cells; ++c) {
    min_count[c] = std::min(count1[c], count2[c]);
    min_total += min_count[c];
  }
  out.overlap = static_cast<double>(min_total) / static_cast<double>(n_aux);

  auto pick_cell = [&](const std::vector<std::uint64_t>& weights, std::uint64_t total) {
    std::vector<double> cdf;
    cdf.reserve(weights.size());
    double acc = 0.0;
    for (std::uint64_t w : weights) {
      acc += static_cast<double>(w);
      cdf.push_back(acc);
    }
    (void)total;
    return rng.categorical_from_cdf(cdf);
  };
  auto draw_point = [&](std::size_t cell, const std::vector<Vec>& outliers) {
    if (cell != out_cell) return binning.sample_in_cell(cell, rng);
    const auto k = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(outliers.size()));
    return outliers[std::min(k, outliers.size() - 1)];
  };

  if (rng.uniform01() < out.overlap) {
    out.glued = true;
    const std::size_t cell = pick_cell(min_count, min_total);
    out.terminal1 = out.terminal2 = draw_point(cell, outliers1);
    return out;
  }
  std::vector<std::uint64_t> res1(n_cells + 1), res2(n_cells + 1);
  for (std::size_t c = 0; c <= n_cells; ++c) {
    res1[c] = count1[c] - min_count[c];
    res2[c] = count2[c] - min_count[c];
  }
  out.terminal1 = draw_point(pick_cell(res1, n_aux - min_total), outliers1);
  out.terminal2 = draw_point(pick_cell(res2, n_aux - min_total), outliers2);
  return out;
}

namespace {

CouplingRecord switching_core(const Model& model, Vec y1, Vec y2, double R, double T,
                              std::uint64_t max_cycles, std::uint64_t n_aux,
                              const Binning& binning, const SimParams& params, Rng& rng) {
  if (!(R > 0.0)) throw ConfigError("switching_coupling: R must be positive");
  if (!(T > 0.0)) throw ConfigError("switching_coupling: T must be positive");
  if (max_cycles < 1) throw ConfigError("switching_coupling: max_cycles must be positive");

  CouplingRecord rec;
  double t_acc = 0.0;
  if ((y1 - y2).norm() == 0.0) {
    rec.glued = true;
    rec.Q_star = 0.0;
    rec.phases.push_back("glued");
    return rec;
  }
  StopSpec stop;
  stop.kind = StopSpec::Kind::kBallEntry;
  stop.radius = R;
  stop.max_horizon = params.horizon;

  for (std::uint64_t cycle = 1; cycle <= max_cycles; ++cycle) {
    rec.cycles = cycle;
    const PairedRun free_run = simple_coupling_run(model, y1, y2, stop, params, rng);
    rec.phases.push_back("free");
    if (free_run.first.exploded || free_run.second.exploded) {
      rec.exploded = true;
      return rec;
    }
    if (!free_run.both_entered) {
      rec.free_phase_capped = true;
      return rec;
    }
    t_acc += free_run.entry_time;
    rec.Q_times.push_back(t_acc);
    y1 = free_run.first.terminal();
    y2 = free_run.second.terminal();
    if ((y1 - y2).norm() == 0.0) {
      rec.glued = true;
      rec.Q_star = t_acc;
      rec.phases.push_back("glued");
      return rec;
    }

    const GluingResult glue = gluing_attempt(model, y1, y2, T, n_aux, binning, params, rng);
    t_acc += T;
    rec.Q_times.push_back(t_acc);
    rec.phases.push_back("gluing");
    y1 = glue.terminal1;
    y2 = glue.terminal2;
    if (glue.glued) {
      rec.glued = true;
      rec.Q_star = t_acc;
      rec.phases.push_back("glued");
      return rec;
    }
  }
  return rec;
}

}  // namespace

CouplingRecord switching_coupling(const Model& model, const Vec& start1, const Vec& start2,
                                  double R, double T, std::uint64_t max_cycles,
                                  std::uint64_t n_aux, const Binning& binning,
                                  const SimParams& params, Rng& rng) {
  return switching_core(model, start1, start2, R, T, max_cycles, n_aux, binning, params, rng);
}

CouplingRecord switching_coupling(const Model& model, const EmpiricalLaw& mu1,
                                  const EmpiricalLaw& mu2, double R, double T,
                                  std::uint64_t max_cycles, std::uint64_t n_aux,
                                  const Binning& binning, const SimParams& params, Rng& rng) {
  const Vec y1 = sample_from_law(mu1, rng);
  const Vec y2 = sample_from_law(mu2, rng);
  return switching_core(model, y1, y2, R, T, max_cycles, n_aux, binning, params, rng);
}

SwitchingSample switching_marginal_sample(const Model& model, const Vec& start1,
                                          const Vec& start2, double R, double T,
                                          double horizon, std::uint64_t n_aux,
                                          const Binning& binning, const SimParams& params,
                                          Rng& rng) {
  if (!(R > 0.0)) throw ConfigError("switching_marginal_sample: R must be positive");
  if (!(T > 0.0)) throw ConfigError("switching_marginal_sample: T must be positive");
  if (!(horizon > 0.0))
    throw ConfigError("switching_marginal_sample: horizon must be positive");

  SwitchingSample out;
  Vec y1 = start1, y2 = start2;
  double t = 0.0;

  auto finish_shared = [&](const Vec& point, double from) {
    out.glued = true;
    out.Q_star = from;
    if (horizon - from > 0.0) {
      SimParams run = params;
      run.horizon = horizon - from;
      const SimOutcome o = simulate(model, point, run, rng);
      out.exploded = o.exploded;
      out.x1 = out.x2 = o.terminal;
    } else {
      out.x1 = out.x2 = point;
    }
  };

  if ((y1 - y2).norm() == 0.0) {
    finish_shared(y1, 0.0);
    return out;
  }
  while (t < horizon) {
    StopSpec stop;
    stop.kind = StopSpec::Kind::kBallEntry;
    stop.radius = R;
    stop.max_horizon = horizon - t;
    const PairedRun free_run = simple_coupling_run(model, y1, y2, stop, params, rng);
    out.x1 = free_run.first.terminal();
    out.x2 = free_run.second.terminal();
    if (free_run.first.exploded || free_run.second.exploded) {
      out.exploded = true;
      return out;
    }
    if (!free_run.both_entered) return out;
    t += free_run.entry_time;
    y1 = free_run.first.terminal();
    y2 = free_run.second.terminal();
    if ((y1 - y2).norm() == 0.0) {
      finish_shared(y1, t);
      return out;
    }
    if (t >= horizon) return out;

    const double window = std::min(T, horizon - t);
    const GluingResult glue = gluing_attempt(model, y1, y2, window, n_aux, binning, params, rng);
    t += window;
    y1 = glue.terminal1;
    y2 = glue.terminal2;
    out.x1 = y1;
    out.x2 = y2;
    if (glue.glued) {
      finish_shared(y1, t);
      return out;
    }
  }
  out.x1 = y1;
  out.x2 = y2;
  return out;
}

ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& values) {
  if (t.size() != values.size() || t.size() < 2)
    throw ConfigError("fit_exponential: need at least two points");
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw ConfigError("fit_exponential: values must be positive");
    logs[i] = std::log(values[i]);
  }
  ExpFit fit;
  fit.line = fit_line(t, logs);
  fit.prefactor = std::exp(fit.line.intercept);
  fit.rate = -fit.line.slope;
  return fit;
}

namespace {

double bootstrap_floor(const EmpiricalLaw& law, const SimParams& params,
                       std::uint64_t t_index) {
  constexpr int kResamples = 200;
  std::vector<double> cdf(law.masses.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < law.masses.size(); ++c) {
    acc += law.masses[c];
    cdf[c] = acc;
  }
  std::vector<double> tvs(kResamples, 0.0);
  for_each_path(kResamples, params.workers, [&](std::uint64_t b) {
    Rng rng(params.seed, stream::kBootstrap, t_index * 1024 + b);
    std::vector<std::uint64_t> counts(law.masses.size(), 0);
    for (std::uint64_t i = 0; i < law.sample_count; ++i)
      ++counts[rng.categorical_from_cdf(cdf)];
    double dist = 0.0;
    for (std::size_t c = 0; c < counts.size(); ++c)
      dist += std::abs(static_cast<double>(counts[c]) /
                           static_cast<double>(law.sample_count) -
                       law.masses[c]);
    tvs[b] = 0.5 * dist;
  });
  double mean = 0.0;
  for (double v : tvs) mean += v;
  return mean / kResamples;
}

}  // namespace

TvCurve tv_decay_curve(const Model& model, const Vec& x, const Vec& y,
                       const std::vector<double>& t_grid, const SimParams& params,
                       const Binning& binning) {
  if (t_grid.empty()) throw ConfigError("tv_decay_curve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw ConfigError("tv_decay_curve: time grid must be increasing");

  TvCurve curve;
  std::vector<double> fit_t, fit_v;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const std::uint64_t offset = i * params.n_paths;
    const EmpiricalLaw law_x =
        estimate_law(model, x, t_grid[i], params, binning, stream::kLawX, offset);
    const EmpiricalLaw law_y =
        estimate_law(model, y, t_grid[i], params, binning, stream::kLawY, offset);
    TvPoint point;
    point.t = t_grid[i];
    point.tv = tv_distance(law_x, law_y);
    point.noise_floor = bootstrap_floor(law_x, params, i);
    curve.points.push_back(point);
    if (point.tv > 3.0 * point.noise_floor && point.tv > 0.0) {
      fit_t.push_back(point.t);
      fit_v.push_back(point.tv);
    }
  }
  curve.fit_times = fit_t;
  curve.resolvable = fit_t.size() >= 2;
  if (curve.resolvable) {
    const ExpFit fit = fit_exponential(fit_t, fit_v);
    curve.fit = fit.line;
    curve.C1_emp = fit.prefactor;
    curve.C2_emp = fit.rate;
  }
  return curve;
}

namespace {

EmpiricalLaw khasminskii_impl(const Model& model,
                              const std::function<Vec(Rng&)>& draw_start, double horizon,
                              const SimParams& params, const Binning& binning) {
  binning.validate();
  if (!(horizon > 0.0)) throw ConfigError("khasminskii_average: horizon must be positive");
  const std::size_t n_cells = binning.cell_count() + 1;
  std::vector<std::vector<double>> hist(params.n_paths);
  SimParams run = params;
  run.horizon = horizon;

  for_each_path(params.n_paths, params.workers, [&](std::uint64_t i) {
    Rng rng(params.seed, stream::kKhasminskii, i);
    const Vec x0 = draw_start(rng);
    auto& local = hist[i];
    local.assign(n_cells, 0.0);
    double prev_t = 0.0;
    std::size_t prev_cell = 0;
    bool has_prev = false;
    auto observe = [&](double t, const Vec& xs) {
      const std::size_t cell = binning.flat_index(xs);
      if (has_prev) {
        const double h = t - prev_t;
        local[prev_cell] += 0.5 * h;
        local[cell] += 0.5 * h;
      }
      prev_t = t;
      prev_cell = cell;
      has_prev = true;
    };
    const SimOutcome out = simulate(model, x0, run, rng, observe);
    if (out.exploded) local[binning.out_index()] += horizon - out.explosion_time;
  });

  std::vector<double> totals(n_cells, 0.0);
  for (const auto& local : hist)
    for (std::size_t c = 0; c < n_cells; ++c) totals[c] += local[c];
  double total = 0.0;
  for (double v : totals) total += v;
  if (!(total > 0.0)) throw NumericError("khasminskii_average: empty occupation histogram");

  EmpiricalLaw law;
  law.binning = binning;
  law.sample_count = params.n_paths;
  law.masses.resize(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) law.masses[c] = totals[c] / total;
  return law;
}

}  // namespace

EmpiricalLaw khasminskii_average(const Model& model, const Vec& start, double horizon,
                                 const SimParams& params, const Binning& binning) {
  return khasminskii_impl(
      model, [&](Rng&) { return start; }, horizon, params, binning);
}

EmpiricalLaw khasminskii_average(const Model& model, const EmpiricalLaw& start, double horizon,
                                 const SimParams& params, const Binning& binning) {
  start.validate();
  return khasminskii_impl(
      model, [&](Rng& rng) { return sample_from_law(start, rng); }, horizon, params, binning);
}

RateBound theoretical_rate_bound(double alpha, double gamma, double c, double T,
                                 double delta, double sup_phi) {
  if (!(alpha > 0.0) || !(gamma > 0.0) || !(T > 0.0) || !(sup_phi > 0.0))
    throw ConfigError("theoretical_rate_bound: alpha, gamma, T, sup_phi must be positive");
  if (!(c > 0.0 && c < 1.0)) throw ConfigError("theoretical_rate_bound: c must lie in (0,1)");
  if (!(delta > 0.0 && delta < 1.0))
    throw ConfigError("theoretical_rate_bound: delta must lie in (0,1)");

  RateBound out;
  out.D = 0.5 * (1.0 - c) * T + std::log(4.0 * gamma / alpha + 4.0 * sup_phi);
  out.p = std::max(1.0, -2.0 * out.D / std::log1p(-delta));
  out.C2 = (1.0 - c) / (4.0 * out.p);
  out.C1_tilde = std::max(gamma / alpha, 1.0) * 2.0 * std::exp(0.5 * (1.0 - c) * T) /
                 (1.0 - std::pow(1.0 - delta, 0.25));
  out.C1 = 2.0 * out.C1_tilde;
  return out;
}

std::vector<TailPoint> beta_mixing_tail(const std::vector<CouplingRecord>& records,
                                        const std::vector<double>& t_grid) {
  if (records.empty()) throw ConfigError("beta_mixing_tail: no records");
  std::vector<TailPoint> tail;
  tail.reserve(t_grid.size());
  for (double t : t_grid) {
    std::uint64_t over = 0;
    for (const auto& rec : records)
      if (!(rec.glued && rec.Q_star <= t)) ++over;
    tail.push_back({t, static_cast<double>(over) / static_cast<double>(records.size()),
                    records.size()});
  }
  return tail;
}

double measure_delta(const Model& model, double T, double R, const SimParams& params,
                     const Binning& binning) {
  if (!(T > 0.0) || !(R > 0.0)) throw ConfigError("measure_delta: T and R must be positive");
  std::vector<Vec> starts;
  starts.push_back(Vec::Zero(model.m));
  if (model.m == 1) {
    for (double s : {-1.0, -0.5, 0.5, 1.0}) starts.push_back(scalar_vec(s * R));
  } else {
    for (const Vec& dir : sphere_covering(model.m, 2 * model.m)) {
      starts.push_back(R * dir);
      starts.push_back(0.5 * R * dir);
    }
  }
  std::vector<EmpiricalLaw> laws;
  laws.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i)
    laws.push_back(estimate_law(model, starts[i], T, params, binning, stream::kDelta,
                                i * params.n_paths));
  double delta = 1.0;
  for (std::size_t i = 0; i < laws.size(); ++i)
    for (std::size_t j = i + 1; j < laws.size(); ++j)
      delta = std::min(delta, 1.0 - tv_distance(laws[i], laws[j]));
  return delta;
}

}  // namespace jumplab
