#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

struct Atom {
  Vec mark;
  double weight = 0.0;
};

// Radial density g(rho) = coef * rho^exponent on [lo, hi], zero elsewhere.
// hi may be +inf; lo may be 0 (infinite activity when the mass diverges there).
struct RadialPower {
  double coef = 0.0;
  double exponent = 0.0;
  double lo = 0.0;
  double hi = kInf;

  double density(double rho) const;
  // Mass of [a, b] intersected with the support; returns kInf when divergent.
  double mass(double a, double b) const;
  // \int rho^q g(rho) drho over [a, b] intersected with the support; kInf when divergent.
  double moment(double q, double a, double b) const;
  // Inverse-CDF draw of rho from the normalized density restricted to [a, b].
  // Requires finite positive mass on [a, b].
  double sample(double a, double b, Rng& rng) const;
};

struct DirectionWeight {
  Vec dir;  // unit vector
  double weight = 0.0;
};

// Diffuse part: radial density times a direction law. Each fixed direction
// carries the full radial mass scaled by its weight; the uniform-sphere law
// carries it once.
struct Diffuse {
  RadialPower radial;
  bool uniform_sphere = false;
  int sphere_dim = 0;  // state dimension when uniform_sphere
  std::vector<DirectionWeight> directions;

  double direction_weight_sum() const;
};

struct LevyMeasure {
  std::vector<Atom> atoms;
  std::optional<Diffuse> diffuse;

  // Throws ConfigError on violated invariants: nonpositive weights, duplicate
  // or zero atom marks, inconsistent dimensions, non-unit directions.
  void validate() const;
  // Common dimension of marks; 0 for the empty measure.
  int dim() const;
  bool empty() const;
};

struct PointEvent {
  double time = 0.0;
  Vec mark;
};

// Realization of the Poisson point measure on (0, horizon] restricted to
// marks with norm >= truncation. Times strictly increasing.
struct PointMeasureRealization {
  double horizon = 0.0;
  double truncation = 0.0;
  std::vector<PointEvent> events;
};

// Pi({u : ||u|| >= truncation}). Throws ConfigError when the diffuse mass
// diverges at the origin and truncation does not cut it off.
double total_rate(const LevyMeasure& measure, double truncation);

PointMeasureRealization sample_point_measure(const LevyMeasure& measure, double horizon,
                                             double truncation, Rng& rng);

// \int_{||u|| > 1} ||u||^q Pi(du); kInf when divergent. Atom test is strict.
double tail_moment(const LevyMeasure& measure, double q);

struct RegionMass {
  double value = 0.0;
  double error_bound = 0.0;  // zero for purely atomic measures
};

// Pi-mass of {u != 0 : predicate(u)}. Atoms are summed exactly; a diffuse part
// is estimated by Monte Carlo over its normalized law (n_samples draws), which
// requires an rng stream and finite diffuse mass.
RegionMass region_mass(const LevyMeasure& measure,
                       const std::function<bool(const Vec&)>& predicate,
                       Rng* rng = nullptr, std::uint64_t n_samples = 20000);

}  // namespace jumplab
