#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "jumplab/conditions.hpp"
#include "jumplab/coupling.hpp"
#include "jumplab/engine.hpp"
#include "jumplab/gallery.hpp"
#include "jumplab/report.hpp"
#include "jumplab/scenario.hpp"

namespace {

namespace jl = jumplab;
using Json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;  // 0 = keep scenario value
};

Json vec_json(const jl::Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Json interval_json(const jl::Interval& iv) {
  Json j;
  j["lo"] = iv.lo;
  j["hi"] = iv.hi;
  return j;
}

jl::Scenario load_with_overrides(const Options& opt, bool scenario_required) {
  jl::Scenario s;
  if (!opt.scenario_path.empty()) {
    s = jl::load_scenario(opt.scenario_path);
  } else if (scenario_required) {
    throw jl::ConfigError("this command requires --scenario <file>");
  }
  if (opt.seed_set) s.sim.seed = opt.seed;
  if (opt.workers > 0) s.sim.workers = opt.workers;
  s.sim.validate();
  // The echo must describe the run actually performed.
  s.raw["sim"]["seed"] = s.sim.seed;
  s.raw["sim"]["workers"] = s.sim.workers;
  return s;
}

const jl::Model& require_model(const jl::Scenario& s) {
  if (!s.has_model) throw jl::ConfigError("this command requires a 'model' block");
  return s.model;
}

void write_report(const Options& opt, const std::string& command, const jl::Scenario& s,
                  const Json& results) {
  std::filesystem::create_directories(opt.out_dir);
  Json report;
  report["command"] = command;
  report["versions"] = Json{{"jumplab", kVersion}};
  report["seed"] = s.sim.seed;
  report["scenario"] = s.raw;
  report["results"] = results;
  jl::write_text_file(opt.out_dir + "/report.json", jl::dump_json_17(report));
}

std::string out_path(const Options& opt, const char* name) {
  std::filesystem::create_directories(opt.out_dir);
  return opt.out_dir + "/" + name;
}

int cmd_simulate(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  const jl::SimulateBlock block = s.simulate_block();

  Json results;
  if (s.sim.n_paths == 1) {
    jl::Rng rng(s.sim.seed, jl::stream::kSimulate, 0);
    const jl::Trajectory traj = jl::simulate_path(model, block.x0, s.sim, rng);
    jl::write_trajectory_csv(out_path(opt, "trajectory.csv"), traj);
    results["terminal"] = vec_json(traj.terminal());
    results["exploded"] = traj.exploded;
    results["n_jumps"] = traj.jumps.size();
    results["skeleton_nodes"] = traj.times.size();
  } else {
    std::vector<jl::Vec> terminals(s.sim.n_paths);
    std::vector<std::uint8_t> exploded(s.sim.n_paths, 0);
    jl::for_each_path(s.sim.n_paths, s.sim.workers, [&](std::uint64_t i) {
      jl::Rng rng(s.sim.seed, jl::stream::kSimulate, i);
      const jl::SimOutcome out = jl::simulate(model, block.x0, s.sim, rng);
      terminals[i] = out.terminal;
      exploded[i] = out.exploded ? 1 : 0;
    });
    jl::write_terminals_csv(out_path(opt, "terminals.csv"), terminals);
    std::uint64_t n_exploded = 0;
    jl::Vec mean = jl::Vec::Zero(model.m);
    for (std::uint64_t i = 0; i < s.sim.n_paths; ++i) {
      if (exploded[i]) {
        ++n_exploded;
        continue;
      }
      mean += terminals[i];
    }
    const std::uint64_t n_ok = s.sim.n_paths - n_exploded;
    if (n_ok > 0) mean /= static_cast<double>(n_ok);
    results["n_paths"] = s.sim.n_paths;
    results["exploded"] = n_exploded;
    results["terminal_mean"] = vec_json(mean);
  }
  write_report(opt, "simulate", s, results);
  return 0;
}

int cmd_check_r(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  const jl::CheckRBlock block = s.check_r_block();
  const jl::RReport rep =
      jl::check_R(model, block.phi.f, block.phi.grad, block.phi.name, block.grid,
                  block.alpha_grid);

  Json results;
  results["phi"] = rep.phi_name;
  results["alpha_hat"] = rep.alpha_hat;
  results["gamma_hat"] = rep.gamma_hat;
  results["margin"] = rep.margin;
  results["alpha_witnessed"] = rep.alpha_witnessed;
  results["phi_grows"] = rep.phi_grows;
  results["violation_count"] = rep.violations.size();
  Json viols = Json::array();
  for (std::size_t i = 0; i < rep.violations.size() && i < 10; ++i)
    viols.push_back(vec_json(rep.violations[i]));
  results["violations_head"] = viols;
  results["grid_size"] = block.grid.size();
  results["pass"] = rep.pass;
  write_report(opt, "check-r", s, results);
  return 0;
}

int cmd_check_n(const Options& opt, const std::string& route_flag) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  jl::CheckNBlock block = s.check_n_block();
  if (!route_flag.empty()) block.route = route_flag;

  Json results;
  results["route"] = block.route;
  results["x_star"] = vec_json(block.x_star);
  if (block.route == "mc") {
    const jl::NReport rep = jl::check_N_mc(model, block.x_star, block.t_star, s.sim);
    results["t_star"] = block.t_star;
    results["p_hat"] = rep.p_hat;
    results["wilson"] = interval_json(rep.wilson_ci);
    results["n_paths"] = rep.n_paths;
    results["svd_tolerance"] = rep.svd_tolerance;
    results["excluded_jump_count"] = rep.excluded_jump_count;
    results["evidence"] = rep.evidence;
  } else if (block.route == "static") {
    const jl::NStaticReport rep =
        jl::check_N_static(model, block.x_star, block.epsilon, block.n_directions);
    results["min_mass"] = rep.min_mass;
    results["error_bound"] = rep.error_bound;
    results["n_directions"] = rep.n_directions;
    results["epsilon"] = rep.epsilon;
    results["pass"] = rep.pass;
  } else {
    const jl::NRankReport rep = jl::check_N_rank(model, block.x_star, block.fd_step);
    results["additive"] = rep.additive;
    results["det"] = rep.det;
    results["singular_values"] = rep.singular_values;
    results["rank"] = rep.rank;
    results["pass"] = rep.pass;
    Json cones = Json::array();
    for (const auto& [delta, mass] : rep.cone_mass) {
      Json row;
      row["delta"] = delta;
      row["min_mass"] = mass;
      cones.push_back(row);
    }
    results["cone_mass"] = cones;
  }
  write_report(opt, "check-n", s, results);
  return 0;
}

int cmd_check_s(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  const jl::CheckSBlock block = s.check_s_block();
  const jl::SReport rep =
      jl::check_S(model, block.x_star, block.radii, block.t, block.epsilon, s.sim);

  Json results;
  results["t"] = rep.t;
  results["epsilon"] = rep.epsilon;
  results["evidence"] = rep.evidence;
  Json entries = Json::array();
  for (const jl::SEntry& e : rep.entries) {
    Json row;
    row["radius"] = e.radius;
    row["start"] = vec_json(e.start);
    row["freq_running_min"] = e.freq_running_min;
    row["freq_at_t"] = e.freq_at_t;
    row["n_paths"] = e.n_paths;
    entries.push_back(row);
  }
  results["entries"] = entries;
  write_report(opt, "check-s", s, results);
  return 0;
}

int cmd_couple(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  const jl::CoupleBlock block = s.couple_block();

  std::vector<jl::CouplingRecord> records(block.n_runs);
  jl::for_each_path(block.n_runs, s.sim.workers, [&](std::uint64_t i) {
    jl::Rng rng(s.sim.seed, jl::stream::kCoupleFree, i);
    records[i] = jl::switching_coupling(model, block.start1, block.start2, block.R, block.T,
                                        block.max_cycles, block.n_aux, block.binning, s.sim,
                                        rng);
  });

  std::uint64_t glued = 0, capped = 0, exploded = 0;
  double q_sum = 0.0, cycles_sum = 0.0;
  for (const auto& rec : records) {
    if (rec.glued) {
      ++glued;
      q_sum += rec.Q_star;
    }
    if (rec.free_phase_capped) ++capped;
    if (rec.exploded) ++exploded;
    cycles_sum += static_cast<double>(rec.cycles);
  }
  const std::vector<jl::TailPoint> tail = jl::beta_mixing_tail(records, block.t_grid);
  jl::write_tail_csv(out_path(opt, "tail.csv"), tail);

  Json results;
  results["n_runs"] = block.n_runs;
  results["glued"] = glued;
  results["glued_fraction"] =
      static_cast<double>(glued) / static_cast<double>(block.n_runs);
  results["glued_wilson"] = interval_json(jl::wilson_interval(glued, block.n_runs));
  results["mean_Q_star_glued"] = glued > 0 ? q_sum / static_cast<double>(glued) : 0.0;
  results["free_phase_capped"] = capped;
  results["exploded"] = exploded;
  results["mean_cycles"] = cycles_sum / static_cast<double>(block.n_runs);
  Json tail_rows = Json::array();
  for (const jl::TailPoint& p : tail) {
    Json row;
    row["t"] = p.t;
    row["tail"] = p.tail;
    row["stderr"] = std::sqrt(p.tail * (1.0 - p.tail) / static_cast<double>(p.n));
    row["n"] = p.n;
    tail_rows.push_back(row);
  }
  results["tail"] = tail_rows;
  write_report(opt, "couple", s, results);
  return 0;
}

int cmd_tv_curve(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  const jl::TvCurveBlock block = s.tv_curve_block();
  const jl::TvCurve curve =
      jl::tv_decay_curve(model, block.x, block.y, block.t_grid, s.sim, block.binning);
  jl::write_tv_csv(out_path(opt, "tv_curve.csv"), curve);
  write_report(opt, "tv-curve", s, jl::tv_curve_json(curve));
  return 0;
}

int cmd_invariant(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::Model& model = require_model(s);
  const jl::InvariantBlock block = s.invariant_block();
  const jl::EmpiricalLaw law =
      jl::khasminskii_average(model, block.start, block.horizon, s.sim, block.binning);
  jl::write_law_csv(out_path(opt, "invariant.csv"), law);
  Json results = jl::law_summary_json(law);
  results["horizon"] = block.horizon;
  write_report(opt, "invariant", s, results);
  return 0;
}

int cmd_rate_bound(const Options& opt) {
  jl::Scenario s = load_with_overrides(opt, true);
  const jl::RateBoundBlock block = s.rate_bound_block();
  const jl::RateBound bound = jl::theoretical_rate_bound(block.alpha, block.gamma, block.c,
                                                         block.T, block.delta, block.sup_phi);
  Json results;
  results["D"] = bound.D;
  results["p"] = bound.p;
  results["C1"] = bound.C1;
  results["C2"] = bound.C2;
  results["C1_tilde"] = bound.C1_tilde;
  results["conservative_bracket"] = bound.conservative_bracket;
  write_report(opt, "rate-bound", s, results);
  return 0;
}

Json tail_moments_json(const std::vector<std::pair<double, double>>& moments) {
  Json rows = Json::array();
  for (const auto& [q, value] : moments) {
    Json row;
    row["q"] = q;
    row["moment"] = std::isfinite(value) ? Json(value) : Json("inf");
    rows.push_back(row);
  }
  return rows;
}

int cmd_gallery(const Options& opt, const std::string& which, double p_flag, double c_flag,
                double horizon_flag, std::uint64_t n_steps_flag, std::uint64_t n_paths_flag,
                std::uint64_t bd_steps_flag) {
  jl::Scenario s = load_with_overrides(opt, which == "prop01");
  jl::GalleryBlock block = s.gallery_block();
  if (p_flag > 0.0) block.p = p_flag;
  if (c_flag > 0.0) block.c = c_flag;
  if (horizon_flag > 0.0) block.horizon = horizon_flag;
  if (n_steps_flag > 0) block.n_steps = n_steps_flag;
  if (bd_steps_flag > 0) block.bd_steps = bd_steps_flag;

  jl::SimParams params = s.sim;
  if (!s.has_sim) params.n_paths = 1000;
  if (n_paths_flag > 0) params.n_paths = n_paths_flag;
  if (opt.workers > 0) params.workers = opt.workers;

  Json results;
  std::string command = "gallery " + which;
  if (which == "5.1") {
    const double horizon = block.horizon > 0.0 ? block.horizon : 200.0;
    const jl::Example51Report rep = jl::run_example_5_1(block.c, horizon, params);
    std::string csv = "path,slope,min_x\n";
    for (std::size_t i = 0; i < rep.slopes.size(); ++i)
      csv += std::to_string(i) + "," + jl::format_g17(rep.slopes[i]) + "," +
             jl::format_g17(rep.minima[i]) + "\n";
    jl::write_text_file(out_path(opt, "slopes.csv"), csv);
    results["c"] = rep.c;
    results["horizon"] = rep.horizon;
    results["n_paths"] = rep.n_paths;
    results["slope_mean"] = rep.slope_mean;
    results["slope_se"] = rep.slope_se;
    results["slope_target"] = rep.slope_target;
    results["escaped"] = rep.escaped;
    results["escape_fraction"] = rep.escape_fraction;
    results["escape_wilson"] = interval_json(rep.escape_wilson);
    results["exploded"] = rep.exploded;
    results["pass_slope"] = rep.pass_slope;
    results["pass_escape"] = rep.pass_escape;
  } else if (which == "5.2") {
    const double horizon = block.horizon > 0.0 ? block.horizon : 100.0;
    jl::Binning binning = block.binning;
    if (binning.cells.empty()) binning = jl::Binning::regular_1d(-8.0, 8.0, 160);
    const jl::Example52Report rep = jl::run_example_5_2(horizon, params, binning);
    results["horizon"] = rep.horizon;
    results["n_paths"] = rep.n_paths;
    results["exits_plus"] = rep.exits_plus;
    results["exits_minus"] = rep.exits_minus;
    results["tv_between_averages"] = rep.tv_between_averages;
    results["pass"] = rep.pass;
  } else if (which == "5.3") {
    const jl::Example53Report rep =
        jl::run_example_5_3(block.p, block.n_steps, params.n_paths, block.bd_steps, params.seed);
    std::string csv = "level,observed,expected\n";
    for (std::size_t k = 0; k < rep.bd_observed.size(); ++k)
      csv += std::to_string(k) + "," + std::to_string(rep.bd_observed[k]) + "," +
             jl::format_g17(rep.bd_expected[k]) + "\n";
    jl::write_text_file(out_path(opt, "bd_occupancy.csv"), csv);
    results["p"] = rep.p;
    results["tv_occupation"] = rep.tv_occupation;
    results["support_collision"] = rep.support_collision;
    results["circle_states_seen"] = rep.circle_states_seen;
    results["r"] = rep.r;
    results["bd_steps"] = rep.bd_steps;
    results["bd_thin_stride"] = rep.bd_thin_stride;
    Json chi;
    chi["statistic"] = rep.chi_square.statistic;
    chi["dof"] = rep.chi_square.dof;
    chi["p_value"] = rep.chi_square.p_value;
    results["chi_square"] = chi;
    results["up_freq"] = rep.up_freq;
    results["up_freq_expected"] = rep.up_freq_expected;
    results["up_freq_band"] = rep.up_freq_band;
    results["pass_tv"] = rep.pass_tv;
    results["pass_chi"] = rep.pass_chi;
    results["pass_up_freq"] = rep.pass_up_freq;
  } else if (which == "prop01") {
    const jl::Model& model = require_model(s);
    const jl::Prop01Options opts = s.prop01_options();
    const jl::Prop01Report rep = jl::run_prop_0_1(model, opts, params);
    results["tail_moments"] = tail_moments_json(rep.tail_moments);
    results["cond_tail_moment"] = rep.cond_tail_moment;
    results["cond_nonzero_measure"] = rep.cond_nonzero_measure;
    results["violations"] = rep.violations;
    results["ran_mc"] = rep.ran_mc;
    if (rep.ran_mc) {
      jl::write_tv_csv(out_path(opt, "tv_curve.csv"), rep.curve);
      jl::write_law_csv(out_path(opt, "invariant.csv"), rep.occupation);
      results["curve"] = jl::tv_curve_json(rep.curve);
      results["tv_final"] = rep.tv_final;
      results["occupation"] = jl::law_summary_json(rep.occupation);
      results["mean"] = rep.mean;
      results["variance"] = rep.variance;
    }
  } else {
    throw jl::ConfigError("gallery: unknown example '" + which +
                          "' (expected 5.1, 5.2, 5.3, or prop01)");
  }
  write_report(opt, command, s, results);
  return 0;
}

int cmd_report(const Options& opt) {
  if (opt.scenario_path.empty())
    throw jl::ConfigError("report: requires --scenario <report.json or scenario.json>");
  std::ifstream in(opt.scenario_path);
  if (!in) throw jl::ConfigError("report: cannot open '" + opt.scenario_path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw jl::ConfigError(std::string("report: malformed JSON: ") + e.what());
  }
  const Json& scenario = j.contains("scenario") ? j.at("scenario") : j;
  const jl::Scenario s = jl::parse_scenario(scenario);

  Json results;
  results["valid"] = true;
  results["has_model"] = s.has_model;
  if (s.has_model) results["model"] = s.model.name;
  results["seed"] = s.sim.seed;
  std::cout << jl::dump_json_17(results);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for Markov processes driven by jump-noise SDEs"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--scenario", opt.scenario_path, "scenario JSON file");
  app.add_option("--out", opt.out_dir, "output directory (default .)");
  auto* seed_opt = app.add_option("--seed", opt.seed, "override the scenario seed");
  app.add_option("--workers", opt.workers, "override the scenario worker count");

  app.add_subcommand("simulate", "simulate paths and write terminals or a trajectory");
  app.add_subcommand("check-r", "recurrence condition via a Lyapunov function on a grid");
  auto* check_n = app.add_subcommand("check-n", "nondegeneracy condition at a point");
  std::string route;
  check_n->add_option("--route", route, "mc | static | rank");
  app.add_subcommand("check-s", "support/reachability table around a point");
  app.add_subcommand("couple", "switching-coupling ensemble and beta-mixing tail");
  app.add_subcommand("tv-curve", "total-variation decay between two starts");
  app.add_subcommand("invariant", "occupation-average approximation of the invariant law");
  app.add_subcommand("rate-bound", "explicit theoretical rate constants");
  auto* gallery = app.add_subcommand("gallery", "counterexamples and the ergodic scenario");
  std::string which;
  double p_flag = 0.0, c_flag = 0.0, horizon_flag = 0.0;
  std::uint64_t n_steps_flag = 0, n_paths_flag = 0, bd_steps_flag = 0;
  gallery->add_option("which", which, "5.1 | 5.2 | 5.3 | prop01")->required();
  gallery->add_option("--p", p_flag, "circle-kernel probability (5.3)");
  gallery->add_option("--c", c_flag, "drift plateau level (5.1)");
  gallery->add_option("--horizon", horizon_flag, "simulation horizon");
  gallery->add_option("--n-steps", n_steps_flag, "circle chain steps (5.3)");
  gallery->add_option("--n-paths", n_paths_flag, "path count");
  gallery->add_option("--bd-steps", bd_steps_flag, "birth-death chain steps (5.3)");
  app.add_subcommand("report", "re-parse and re-validate an emitted report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  opt.seed_set = seed_opt->count() > 0;

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "simulate") return cmd_simulate(opt);
    if (name == "check-r") return cmd_check_r(opt);
    if (name == "check-n") return cmd_check_n(opt, route);
    if (name == "check-s") return cmd_check_s(opt);
    if (name == "couple") return cmd_couple(opt);
    if (name == "tv-curve") return cmd_tv_curve(opt);
    if (name == "invariant") return cmd_invariant(opt);
    if (name == "rate-bound") return cmd_rate_bound(opt);
    if (name == "gallery")
      return cmd_gallery(opt, which, p_flag, c_flag, horizon_flag, n_steps_flag, n_paths_flag,
                         bd_steps_flag);
    if (name == "report") return cmd_report(opt);
    throw jl::ConfigError("unknown command '" + name + "'");
  } catch (const jl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const jl::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
