#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "jumplab/conditions.hpp"
#include "jumplab/coupling.hpp"
#include "jumplab/gallery.hpp"
#include "jumplab/law.hpp"
#include "jumplab/levy.hpp"
#include "jumplab/model.hpp"
#include "jumplab/sde.hpp"

namespace jumplab {

// Lyapunov test function selected by name in scenario files.
struct PhiSpec {
  std::string name;
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> grad;
};

// Registry: quadratic (|x|^2), quartic (|x|^4), soft_abs (sqrt(1+|x|^2)).
PhiSpec phi_by_name(const std::string& name);

struct SimulateBlock {
  Vec x0;
};

struct CheckRBlock {
  PhiSpec phi;
  std::vector<Vec> grid;
  std::vector<double> alpha_grid;
};

struct CheckNBlock {
  Vec x_star;
  double t_star = 1.0;
  double epsilon = 1e-3;
  int n_directions = 0;
  double fd_step = 1e-5;
  std::string route = "mc";  // mc | static | rank
};

struct CheckSBlock {
  Vec x_star;
  std::vector<double> radii;
  double t = 1.0;
  double epsilon = 0.1;
};

struct CoupleBlock {
  Vec start1;
  Vec start2;
  double R = 1.0;
  double T = 1.0;
  std::uint64_t max_cycles = 50;
  std::uint64_t n_aux = 2000;
  std::uint64_t n_runs = 1000;
  std::vector<double> t_grid;
  Binning binning;
};

struct TvCurveBlock {
  Vec x;
  Vec y;
  std::vector<double> t_grid;
  Binning binning;
};

struct InvariantBlock {
  Vec start;
  double horizon = 200.0;
  Binning binning;
};

struct RateBoundBlock {
  double alpha = 0.0;
  double gamma = 0.0;
  double c = 0.0;
  double T = 0.0;
  double delta = 0.0;
  double sup_phi = 0.0;
};

struct GalleryBlock {
  double p = 0.1;
  double c = 0.5;
  double horizon = 0.0;  // 0 = command default
  std::uint64_t n_steps = 200;
  std::uint64_t bd_steps = 1000000;
  Binning binning;  // example 5.2 occupation binning; empty = default
};

// A parsed scenario: the registry model, simulation parameters, and the raw
// JSON tree the command-specific blocks are read from.
struct Scenario {
  nlohmann::ordered_json raw;
  Model model;
  SimParams sim;
  bool has_model = false;
  bool has_sim = false;

  SimulateBlock simulate_block() const;
  CheckRBlock check_r_block() const;
  CheckNBlock check_n_block() const;
  CheckSBlock check_s_block() const;
  CoupleBlock couple_block() const;
  TvCurveBlock tv_curve_block() const;
  InvariantBlock invariant_block() const;
  RateBoundBlock rate_bound_block() const;
  GalleryBlock gallery_block() const;
  Prop01Options prop01_options() const;
};

LevyMeasure parse_measure(const nlohmann::ordered_json& j);
Binning parse_binning(const nlohmann::ordered_json& j, int dim);

// Validates structure and types; numeric preconditions are re-checked by the
// owning operations. The model block is optional only for gallery scenarios.
Scenario parse_scenario(const nlohmann::ordered_json& j);
Scenario load_scenario(const std::string& path);

}  // namespace jumplab
