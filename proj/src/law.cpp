#include "jumplab/law.hpp"

#include <cmath>

#include "jumplab/engine.hpp"

namespace jumplab {

void Binning::validate() const {
  const auto dims = static_cast<std::size_t>(origin.size());
  if (dims == 0 || width.size() != origin.size() || cells.size() != dims)
    throw ConfigError("Binning: inconsistent axis specs");
  for (std::size_t i = 0; i < dims; ++i) {
    if (cells[i] < 1) throw ConfigError("Binning: each axis needs at least one cell");
    if (!(width[static_cast<int>(i)] > 0.0))
      throw ConfigError("Binning: cell widths must be positive");
  }
}

std::size_t Binning::cell_count() const {
  std::size_t n = 1;
  for (int c : cells) n *= static_cast<std::size_t>(c);
  return n;
}

std::size_t Binning::flat_index(const Vec& x) const {
  std::size_t flat = 0;
  for (int i = 0; i < origin.size(); ++i) {
    const double rel = (x[i] - origin[i]) / width[i];
    if (rel < 0.0 || !(rel < static_cast<double>(cells[static_cast<std::size_t>(i)])))
      return out_index();
    flat = flat * static_cast<std::size_t>(cells[static_cast<std::size_t>(i)]) +
           static_cast<std::size_t>(rel);
  }
  return flat;
}

Vec Binning::cell_center(std::size_t flat) const {
  Vec x(origin.size());
  for (int i = static_cast<int>(origin.size()) - 1; i >= 0; --i) {
    const auto n = static_cast<std::size_t>(cells[static_cast<std::size_t>(i)]);
    const std::size_t k = flat % n;
    flat /= n;
    x[i] = origin[i] + (static_cast<double>(k) + 0.5) * width[i];
  }
  return x;
}

Vec Binning::sample_in_cell(std::size_t flat, Rng& rng) const {
  Vec x(origin.size());
  for (int i = static_cast<int>(origin.size()) - 1; i >= 0; --i) {
    const auto n = static_cast<std::size_t>(cells[static_cast<std::size_t>(i)]);
    const std::size_t k = flat % n;
    flat /= n;
    x[i] = origin[i] + (static_cast<double>(k) + rng.uniform01()) * width[i];
  }
  return x;
}

bool Binning::same_spec(const Binning& other) const {
  return cells == other.cells && origin.size() == other.origin.size() &&
         (origin - other.origin).cwiseAbs().maxCoeff() <= kNumericZero &&
         (width - other.width).cwiseAbs().maxCoeff() <= kNumericZero;
}

Binning Binning::regular_1d(double lo, double hi, int n) {
  if (!(hi > lo) || n < 1) throw ConfigError("Binning: empty interval");
  Binning b;
  b.origin = scalar_vec(lo);
  b.width = scalar_vec((hi - lo) / n);
  b.cells = {n};
  return b;
}

void EmpiricalLaw::validate() const {
  binning.validate();
  if (masses.size() != binning.cell_count() + 1)
    throw ConfigError("EmpiricalLaw: mass vector size mismatch");
  double sum = 0.0;
  for (double m : masses) {
    if (m < 0.0) throw ConfigError("EmpiricalLaw: negative mass");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("EmpiricalLaw: masses do not sum to 1");
}

EmpiricalLaw law_from_samples(const std::vector<Vec>& samples, const Binning& binning) {
  binning.validate();
  if (samples.empty()) throw ConfigError("law_from_samples: no samples");
  EmpiricalLaw law;
  law.binning = binning;
  law.sample_count = samples.size();
  std::vector<std::uint64_t> counts(binning.cell_count() + 1, 0);
  for (const Vec& x : samples) ++counts[binning.flat_index(x)];
  law.masses.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    law.masses[i] = static_cast<double>(counts[i]) / static_cast<double>(samples.size());
  return law;
}

double law_mean(const EmpiricalLaw& law, int axis) {
  double in_mass = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < law.binning.cell_count(); ++i) {
    if (law.masses[i] <= 0.0) continue;
    in_mass += law.masses[i];
    acc += law.masses[i] * law.binning.cell_center(i)[axis];
  }
  if (in_mass <= 0.0) throw ConfigError("law_mean: no in-range mass");
  return acc / in_mass;
}

double law_variance(const EmpiricalLaw& law, int axis) {
  const double mean = law_mean(law, axis);
  double in_mass = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < law.binning.cell_count(); ++i) {
    if (law.masses[i] <= 0.0) continue;
    const double d = law.binning.cell_center(i)[axis] - mean;
    in_mass += law.masses[i];
    acc += law.masses[i] * d * d;
  }
  return acc / in_mass;
}

Vec sample_from_law(const EmpiricalLaw& law, Rng& rng) {
  double in_mass = 0.0;
  for (std::size_t i = 0; i < law.binning.cell_count(); ++i) in_mass += law.masses[i];
  if (in_mass <= 0.0) throw ConfigError("sample_from_law: no in-range mass");
  double u = rng.uniform01() * in_mass;
  std::size_t chosen = law.binning.cell_count() - 1;
  for (std::size_t i = 0; i < law.binning.cell_count(); ++i) {
    u -= law.masses[i];
    if (u < 0.0) {
      chosen = i;
      break;
    }
  }
  return law.binning.sample_in_cell(chosen, rng);
}

namespace {

EmpiricalLaw estimate_law_impl(const Model& model,
                               const std::function<Vec(Rng&)>& draw_start, double t,
                               const SimParams& params, const Binning& binning,
                               std::uint64_t purpose, std::uint64_t stream_offset) {
  binning.validate();
  if (t < 0.0) throw ConfigError("estimate_law: negative time");
  std::vector<Vec> terminals(params.n_paths);
  std::vector<unsigned char> exploded(params.n_paths, 0);
  SimParams run = params;
  run.horizon = t;
  for_each_path(params.n_paths, params.workers, [&](std::uint64_t i) {
    Rng rng(params.seed, purpose, stream_offset + i);
    const Vec x0 = draw_start(rng);
    if (t == 0.0) {
      terminals[i] = x0;
      return;
    }
    const SimOutcome out = simulate(model, x0, run, rng);
    terminals[i] = out.terminal;
    exploded[i] = out.exploded ? 1 : 0;
  });
  EmpiricalLaw law;
  law.binning = binning;
  law.sample_count = params.n_paths;
  std::vector<std::uint64_t> counts(binning.cell_count() + 1, 0);
  for (std::uint64_t i = 0; i < params.n_paths; ++i)
    ++counts[exploded[i] ? binning.out_index() : binning.flat_index(terminals[i])];
  law.masses.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    law.masses[i] = static_cast<double>(counts[i]) / static_cast<double>(params.n_paths);
  return law;
}

}  // namespace

EmpiricalLaw estimate_law(const Model& model, const Vec& start, double t,
                          const SimParams& params, const Binning& binning,
                          std::uint64_t purpose, std::uint64_t stream_offset) {
  return estimate_law_impl(
      model, [&](Rng&) { return start; }, t, params, binning, purpose, stream_offset);
}

EmpiricalLaw estimate_law(const Model& model, const EmpiricalLaw& start, double t,
                          const SimParams& params, const Binning& binning,
                          std::uint64_t purpose, std::uint64_t stream_offset) {
  start.validate();
  return estimate_law_impl(
      model, [&](Rng& rng) { return sample_from_law(start, rng); }, t, params, binning,
      purpose, stream_offset);
}

double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  if (!a.binning.same_spec(b.binning))
    throw ConfigError("tv_distance: laws use different binnings");
  if (a.masses.size() != b.masses.size())
    throw ConfigError("tv_distance: mass vector size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < a.masses.size(); ++i)
    total += std::abs(a.masses[i] - b.masses[i]);
  return 0.5 * total;
}

}  // namespace jumplab
