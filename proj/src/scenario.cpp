#include "jumplab/scenario.hpp"

#include <cmath>
#include <fstream>

namespace jumplab {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("scenario: " + msg); }

const Json& need(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) fail(ctx + " is missing '" + key + "'");
  return j.at(key);
}

double to_num(const Json& j, const std::string& ctx) {
  if (!j.is_number()) fail(ctx + " must be a number");
  return j.get<double>();
}

double num_field(const Json& j, const char* key, const std::string& ctx) {
  return to_num(need(j, key, ctx), ctx + "." + key);
}

double num_or(const Json& j, const char* key, double fallback, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return to_num(j.at(key), ctx + "." + key);
}

std::uint64_t to_count(const Json& j, const std::string& ctx) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    const auto v = j.get<std::int64_t>();
    if (v < 0) fail(ctx + " must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v < 0.0 || v != std::floor(v) || v > 9e15) fail(ctx + " must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  }
  fail(ctx + " must be an integer");
}

std::uint64_t count_or(const Json& j, const char* key, std::uint64_t fallback,
                       const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return to_count(j.at(key), ctx + "." + key);
}

Vec to_vec(const Json& j, const std::string& ctx) {
  if (j.is_number()) return scalar_vec(j.get<double>());
  if (!j.is_array() || j.empty()) fail(ctx + " must be a number or a nonempty array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = to_num(j[i], ctx);
  return v;
}

std::vector<double> to_num_list(const Json& j, const std::string& ctx) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array() || j.empty()) fail(ctx + " must be a number or a nonempty array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(to_num(e, ctx));
  return out;
}

std::string str_or(const Json& j, const char* key, const std::string& fallback,
                   const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) fail(ctx + "." + key + " must be a string");
  return j.at(key).get<std::string>();
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  if (!j.is_object()) fail(ctx + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) fail(ctx + " has unknown key '" + key + "'");
  }
}

RadialPower parse_radial(const Json& j, const std::string& ctx) {
  RadialPower radial;
  if (j.contains("pareto")) {
    check_keys(j, {"pareto"}, ctx);
    const Json& par = j.at("pareto");
    check_keys(par, {"alpha", "cutoff"}, ctx + ".pareto");
    const double alpha = num_field(par, "alpha", ctx + ".pareto");
    const double cutoff = num_field(par, "cutoff", ctx + ".pareto");
    if (!(alpha > 0.0) || !(cutoff > 0.0))
      fail(ctx + ".pareto: alpha and cutoff must be positive");
    radial.coef = alpha * std::pow(cutoff, alpha);
    radial.exponent = -alpha - 1.0;
    radial.lo = cutoff;
    radial.hi = kInf;
    return radial;
  }
  check_keys(j, {"coef", "exponent", "lo", "hi"}, ctx);
  radial.coef = num_field(j, "coef", ctx);
  radial.exponent = num_field(j, "exponent", ctx);
  radial.lo = num_field(j, "lo", ctx);
  radial.hi = num_or(j, "hi", kInf, ctx);
  return radial;
}

}  // namespace

LevyMeasure parse_measure(const Json& j) {
  const std::string ctx = "measure";
  check_keys(j, {"atoms", "diffuse"}, ctx);
  LevyMeasure measure;
  if (j.contains("atoms")) {
    const Json& atoms = j.at("atoms");
    if (!atoms.is_array()) fail(ctx + ".atoms must be an array");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string actx = ctx + ".atoms[" + std::to_string(i) + "]";
      check_keys(atoms[i], {"mark", "weight"}, actx);
      Atom atom;
      atom.mark = to_vec(need(atoms[i], "mark", actx), actx + ".mark");
      atom.weight = num_field(atoms[i], "weight", actx);
      measure.atoms.push_back(std::move(atom));
    }
  }
  if (j.contains("diffuse")) {
    const Json& dj = j.at("diffuse");
    const std::string dctx = ctx + ".diffuse";
    check_keys(dj, {"radial", "pareto", "directions", "uniform_sphere", "sphere_dim"}, dctx);
    if (dj.contains("pareto") && dj.contains("radial"))
      fail(dctx + ": give either 'radial' or 'pareto', not both");
    Diffuse diffuse;
    if (dj.contains("pareto"))
      diffuse.radial = parse_radial(Json{{"pareto", dj.at("pareto")}}, dctx);
    else
      diffuse.radial = parse_radial(need(dj, "radial", dctx), dctx + ".radial");
    if (dj.contains("uniform_sphere") && dj.at("uniform_sphere").get<bool>()) {
      diffuse.uniform_sphere = true;
      diffuse.sphere_dim = static_cast<int>(count_or(dj, "sphere_dim", 2, dctx));
    } else {
      const Json& dirs = need(dj, "directions", dctx);
      if (!dirs.is_array() || dirs.empty()) fail(dctx + ".directions must be a nonempty array");
      for (std::size_t i = 0; i < dirs.size(); ++i) {
        const std::string ectx = dctx + ".directions[" + std::to_string(i) + "]";
        check_keys(dirs[i], {"dir", "weight"}, ectx);
        DirectionWeight dw;
        dw.dir = to_vec(need(dirs[i], "dir", ectx), ectx + ".dir");
        dw.weight = num_or(dirs[i], "weight", 1.0, ectx);
        diffuse.directions.push_back(std::move(dw));
      }
    }
    measure.diffuse = std::move(diffuse);
  }
  measure.validate();
  return measure;
}

Binning parse_binning(const Json& j, int dim) {
  const std::string ctx = "binning";
  if (j.contains("lo")) {
    check_keys(j, {"lo", "hi", "n"}, ctx);
    if (dim != 1) fail(ctx + ": lo/hi/n form is one-dimensional; use origin/width/cells");
    const double lo = num_field(j, "lo", ctx);
    const double hi = num_field(j, "hi", ctx);
    const auto n = to_count(need(j, "n", ctx), ctx + ".n");
    if (!(hi > lo) || n < 1) fail(ctx + ": requires hi > lo and n >= 1");
    return Binning::regular_1d(lo, hi, static_cast<int>(n));
  }
  check_keys(j, {"origin", "width", "cells"}, ctx);
  Binning binning;
  binning.origin = to_vec(need(j, "origin", ctx), ctx + ".origin");
  binning.width = to_vec(need(j, "width", ctx), ctx + ".width");
  const Json& cells = need(j, "cells", ctx);
  if (!cells.is_array() || cells.empty()) fail(ctx + ".cells must be a nonempty array");
  for (const auto& c : cells)
    binning.cells.push_back(static_cast<int>(to_count(c, ctx + ".cells")));
  binning.validate();
  if (dim != 0 && static_cast<int>(binning.cells.size()) != dim)
    fail(ctx + ": dimension does not match the model");
  return binning;
}

PhiSpec phi_by_name(const std::string& name) {
  PhiSpec spec;
  spec.name = name;
  if (name == "quadratic") {
    spec.f = [](const Vec& x) { return x.squaredNorm(); };
    spec.grad = [](const Vec& x) { return Vec(2.0 * x); };
  } else if (name == "quartic") {
    spec.f = [](const Vec& x) {
      const double s = x.squaredNorm();
      return s * s;
    };
    spec.grad = [](const Vec& x) { return Vec(4.0 * x.squaredNorm() * x); };
  } else if (name == "soft_abs") {
    spec.f = [](const Vec& x) { return std::sqrt(1.0 + x.squaredNorm()); };
    spec.grad = [](const Vec& x) { return Vec(x / std::sqrt(1.0 + x.squaredNorm())); };
  } else {
    fail("unknown phi '" + name + "' (expected quadratic, quartic, or soft_abs)");
  }
  return spec;
}

namespace {

const Json& block(const Json& raw, const char* name) {
  if (!raw.contains(name)) fail(std::string("missing '") + name + "' block");
  if (!raw.at(name).is_object()) fail(std::string("'") + name + "' block must be an object");
  return raw.at(name);
}

std::vector<Vec> parse_grid(const Json& j, int dim, const std::string& ctx) {
  if (j.contains("points")) {
    const Json& pts = j.at("points");
    if (!pts.is_array() || pts.empty()) fail(ctx + ".points must be a nonempty array");
    std::vector<Vec> out;
    for (const auto& p : pts) {
      Vec v = to_vec(p, ctx + ".points");
      if (static_cast<int>(v.size()) != dim) fail(ctx + ".points dimension mismatch");
      out.push_back(std::move(v));
    }
    return out;
  }
  check_keys(j, {"lo", "hi", "n"}, ctx);
  const double lo = num_field(j, "lo", ctx);
  const double hi = num_field(j, "hi", ctx);
  const auto n = to_count(need(j, "n", ctx), ctx + ".n");
  if (!(hi > lo) || n < 2) fail(ctx + ": requires hi > lo and n >= 2");
  if (dim > 3) fail(ctx + ": product grids support at most three dimensions; give points");
  double total = 1.0;
  for (int a = 0; a < dim; ++a) total *= static_cast<double>(n);
  if (total > 200000.0) fail(ctx + ": grid too large");

  std::vector<double> axis(n);
  for (std::uint64_t i = 0; i < n; ++i)
    axis[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  std::vector<Vec> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    Vec v(dim);
    for (int a = 0; a < dim; ++a) v[a] = axis[idx[static_cast<std::size_t>(a)]];
    out.push_back(std::move(v));
    int a = dim - 1;
    while (a >= 0) {
      if (++idx[static_cast<std::size_t>(a)] < n) break;
      idx[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

}  // namespace

SimulateBlock Scenario::simulate_block() const {
  const Json& j = block(raw, "simulate");
  check_keys(j, {"x0"}, "simulate");
  SimulateBlock out;
  out.x0 = to_vec(need(j, "x0", "simulate"), "simulate.x0");
  return out;
}

CheckRBlock Scenario::check_r_block() const {
  const Json& j = block(raw, "check_r");
  check_keys(j, {"phi", "grid", "alpha_grid"}, "check_r");
  CheckRBlock out;
  out.phi = phi_by_name(str_or(j, "phi", "quadratic", "check_r"));
  out.grid = parse_grid(need(j, "grid", "check_r"), model.m, "check_r.grid");
  if (j.contains("alpha_grid"))
    out.alpha_grid = to_num_list(j.at("alpha_grid"), "check_r.alpha_grid");
  else
    out.alpha_grid = {0.25, 0.5, 1.0, 2.0, 4.0};
  return out;
}

CheckNBlock Scenario::check_n_block() const {
  const Json& j = block(raw, "check_n");
  check_keys(j, {"x_star", "t_star", "epsilon", "n_directions", "fd_step", "route"}, "check_n");
  CheckNBlock out;
  out.x_star = to_vec(need(j, "x_star", "check_n"), "check_n.x_star");
  out.t_star = num_or(j, "t_star", 1.0, "check_n");
  out.epsilon = num_or(j, "epsilon", 1e-3, "check_n");
  out.n_directions = static_cast<int>(count_or(j, "n_directions", 0, "check_n"));
  out.fd_step = num_or(j, "fd_step", 1e-5, "check_n");
  out.route = str_or(j, "route", "mc", "check_n");
  if (out.route != "mc" && out.route != "static" && out.route != "rank")
    fail("check_n.route must be one of mc, static, rank");
  return out;
}

CheckSBlock Scenario::check_s_block() const {
  const Json& j = block(raw, "check_s");
  check_keys(j, {"x_star", "radii", "t", "epsilon"}, "check_s");
  CheckSBlock out;
  out.x_star = to_vec(need(j, "x_star", "check_s"), "check_s.x_star");
  out.radii = to_num_list(need(j, "radii", "check_s"), "check_s.radii");
  out.t = num_or(j, "t", 1.0, "check_s");
  out.epsilon = num_or(j, "epsilon", 0.1, "check_s");
  return out;
}

CoupleBlock Scenario::couple_block() const {
  const Json& j = block(raw, "couple");
  check_keys(j, {"start1", "start2", "R", "T", "max_cycles", "n_aux", "n_runs", "t_grid",
                 "binning"},
             "couple");
  CoupleBlock out;
  out.start1 = to_vec(need(j, "start1", "couple"), "couple.start1");
  out.start2 = to_vec(need(j, "start2", "couple"), "couple.start2");
  out.R = num_or(j, "R", 1.0, "couple");
  out.T = num_or(j, "T", 1.0, "couple");
  out.max_cycles = count_or(j, "max_cycles", 50, "couple");
  out.n_aux = count_or(j, "n_aux", 2000, "couple");
  out.n_runs = count_or(j, "n_runs", 1000, "couple");
  out.t_grid = to_num_list(need(j, "t_grid", "couple"), "couple.t_grid");
  out.binning = parse_binning(block(raw.at("couple"), "binning"), model.m);
  return out;
}

TvCurveBlock Scenario::tv_curve_block() const {
  const Json& j = block(raw, "tv_curve");
  check_keys(j, {"x", "y", "t_grid", "binning"}, "tv_curve");
  TvCurveBlock out;
  out.x = to_vec(need(j, "x", "tv_curve"), "tv_curve.x");
  out.y = to_vec(need(j, "y", "tv_curve"), "tv_curve.y");
  out.t_grid = to_num_list(need(j, "t_grid", "tv_curve"), "tv_curve.t_grid");
  out.binning = parse_binning(block(raw.at("tv_curve"), "binning"), model.m);
  return out;
}

InvariantBlock Scenario::invariant_block() const {
  const Json& j = block(raw, "invariant");
  check_keys(j, {"start", "horizon", "binning"}, "invariant");
  InvariantBlock out;
  out.start = to_vec(need(j, "start", "invariant"), "invariant.start");
  out.horizon = num_or(j, "horizon", 200.0, "invariant");
  out.binning = parse_binning(block(raw.at("invariant"), "binning"), model.m);
  return out;
}

RateBoundBlock Scenario::rate_bound_block() const {
  const Json& j = block(raw, "rate_bound");
  check_keys(j, {"alpha", "gamma", "c", "T", "delta", "sup_phi"}, "rate_bound");
  RateBoundBlock out;
  out.alpha = num_field(j, "alpha", "rate_bound");
  out.gamma = num_field(j, "gamma", "rate_bound");
  out.c = num_field(j, "c", "rate_bound");
  out.T = num_field(j, "T", "rate_bound");
  out.delta = num_field(j, "delta", "rate_bound");
  out.sup_phi = num_field(j, "sup_phi", "rate_bound");
  return out;
}

GalleryBlock Scenario::gallery_block() const {
  GalleryBlock out;
  if (!raw.contains("gallery")) return out;
  const Json& j = block(raw, "gallery");
  check_keys(j, {"p", "c", "horizon", "n_steps", "bd_steps", "binning"}, "gallery");
  out.p = num_or(j, "p", out.p, "gallery");
  out.c = num_or(j, "c", out.c, "gallery");
  out.horizon = num_or(j, "horizon", out.horizon, "gallery");
  out.n_steps = count_or(j, "n_steps", out.n_steps, "gallery");
  out.bd_steps = count_or(j, "bd_steps", out.bd_steps, "gallery");
  if (j.contains("binning")) out.binning = parse_binning(j.at("binning"), 0);
  return out;
}

Prop01Options Scenario::prop01_options() const {
  Prop01Options out;
  if (!raw.contains("prop01")) return out;
  const Json& j = block(raw, "prop01");
  check_keys(j, {"q", "x_a", "x_b", "t_grid", "binning", "avg_horizon"}, "prop01");
  if (j.contains("q")) out.q_list = to_num_list(j.at("q"), "prop01.q");
  if (j.contains("x_a")) out.x_a = to_vec(j.at("x_a"), "prop01.x_a");
  if (j.contains("x_b")) out.x_b = to_vec(j.at("x_b"), "prop01.x_b");
  if (j.contains("t_grid")) out.t_grid = to_num_list(j.at("t_grid"), "prop01.t_grid");
  if (j.contains("binning")) out.binning = parse_binning(j.at("binning"), 1);
  out.avg_horizon = num_or(j, "avg_horizon", out.avg_horizon, "prop01");
  return out;
}

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) fail("top level must be an object");
  Scenario s;
  s.raw = j;
  if (j.contains("model")) {
    const Json& mj = j.at("model");
    check_keys(mj, {"name", "params", "delta_truncation"}, "model");
    const Json& name = need(mj, "name", "model");
    if (!name.is_string()) fail("model.name must be a string");
    std::map<std::string, std::vector<double>> params;
    if (mj.contains("params")) {
      const Json& pj = mj.at("params");
      if (!pj.is_object()) fail("model.params must be an object");
      for (const auto& [key, value] : pj.items())
        params[key] = to_num_list(value, "model.params." + key);
    }
    LevyMeasure measure;
    if (j.contains("measure")) measure = parse_measure(j.at("measure"));
    s.model = make_model(name.get<std::string>(), params, measure);
    if (mj.contains("delta_truncation")) {
      s.model.delta_truncation = to_num(mj.at("delta_truncation"), "model.delta_truncation");
      s.model.validate();
    }
    s.has_model = true;
  } else if (j.contains("measure")) {
    fail("a 'measure' block requires a 'model' block");
  }
  if (j.contains("sim")) {
    s.has_sim = true;
    const Json& sj = j.at("sim");
    check_keys(sj,
               {"dt", "horizon", "truncation", "seed", "n_paths", "workers", "overflow_bound"},
               "sim");
    s.sim.dt = num_or(sj, "dt", s.sim.dt, "sim");
    s.sim.horizon = num_or(sj, "horizon", s.sim.horizon, "sim");
    s.sim.truncation = num_or(sj, "truncation", s.sim.truncation, "sim");
    s.sim.seed = count_or(sj, "seed", s.sim.seed, "sim");
    s.sim.n_paths = count_or(sj, "n_paths", s.sim.n_paths, "sim");
    s.sim.workers = static_cast<int>(count_or(sj, "workers", 1, "sim"));
    s.sim.overflow_bound = num_or(sj, "overflow_bound", s.sim.overflow_bound, "sim");
    s.sim.validate();
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario: malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace jumplab
