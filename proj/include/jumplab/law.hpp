#pragma once

#include <cstdint>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/sde.hpp"

namespace jumplab {

// Regular grid over a box: origin + cells[i] cells of width[i] per axis.
// Flat indexing is row-major; one extra slot indexes everything outside.
struct Binning {
  Vec origin;
  Vec width;
  std::vector<int> cells;

  void validate() const;
  std::size_t cell_count() const;                 // in-range cells only
  std::size_t out_index() const { return cell_count(); }
  std::size_t flat_index(const Vec& x) const;     // out_index() when outside
  Vec cell_center(std::size_t flat) const;
  Vec sample_in_cell(std::size_t flat, Rng& rng) const;
  bool same_spec(const Binning& other) const;

  static Binning regular_1d(double lo, double hi, int n);
};

struct EmpiricalLaw {
  Binning binning;
  std::vector<double> masses;  // cell_count() + 1 entries; last is out-of-range
  std::uint64_t sample_count = 0;

  double out_of_range_mass() const { return masses.back(); }
  void validate() const;  // masses >= 0, sum to 1 within 1e-12
};

EmpiricalLaw law_from_samples(const std::vector<Vec>& samples, const Binning& binning);

// In-range conditional moments along one axis (cell centers as representatives).
double law_mean(const EmpiricalLaw& law, int axis = 0);
double law_variance(const EmpiricalLaw& law, int axis = 0);

// Draws one state from the law; out-of-range mass is folded back into the
// in-range cells.
Vec sample_from_law(const EmpiricalLaw& law, Rng& rng);

// Histogram of X(t) over params.n_paths independent paths from the given
// start. t overrides params.horizon; t = 0 re-bins the start. Exploded paths
// land in the out-of-range cell. Streams derive from
// (params.seed, purpose, stream_offset + path).
EmpiricalLaw estimate_law(const Model& model, const Vec& start, double t,
                          const SimParams& params, const Binning& binning,
                          std::uint64_t purpose = stream::kLawX,
                          std::uint64_t stream_offset = 0);
EmpiricalLaw estimate_law(const Model& model, const EmpiricalLaw& start, double t,
                          const SimParams& params, const Binning& binning,
                          std::uint64_t purpose = stream::kLawX,
                          std::uint64_t stream_offset = 0);

// Half L1 distance over all cells including the out-of-range cell.
// Throws ConfigError when the binning specs differ.
double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);

}  // namespace jumplab
