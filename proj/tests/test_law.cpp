#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/law.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"

using namespace jumplab;

namespace {

Model jump_ou() {
  LevyMeasure pi;
  pi.atoms.push_back({scalar_vec(1.0), 1.0});
  return make_model("ou_jump", {{"theta", {1.0}}}, pi);
}

}  // namespace

TEST_CASE("binning indexes edges the standard half-open way") {
  const Binning b = Binning::regular_1d(0.0, 1.0, 10);
  CHECK(b.cell_count() == 10);
  CHECK(b.out_index() == 10);
  CHECK(b.flat_index(scalar_vec(0.0)) == 0);
  CHECK(b.flat_index(scalar_vec(0.05)) == 0);
  CHECK(b.flat_index(scalar_vec(0.999)) == 9);
  CHECK(b.flat_index(scalar_vec(1.0)) == b.out_index());
  CHECK(b.flat_index(scalar_vec(-0.001)) == b.out_index());
  CHECK(b.flat_index(scalar_vec(50.0)) == b.out_index());

  CHECK(b.cell_center(0)[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(b.cell_center(9)[0] == doctest::Approx(0.95).epsilon(1e-14));
}

TEST_CASE("binning in two dimensions round-trips centers") {
  Binning b;
  Vec origin(2), width(2);
  origin << -1.0, 0.0;
  width << 0.5, 1.0;
  b.origin = origin;
  b.width = width;
  b.cells = {4, 3};
  b.validate();
  CHECK(b.cell_count() == 12);
  for (std::size_t flat = 0; flat < b.cell_count(); ++flat)
    CHECK(b.flat_index(b.cell_center(flat)) == flat);

  Vec outside(2);
  outside << -1.0, 3.0;
  CHECK(b.flat_index(outside) == b.out_index());

  Rng rng(73, 1, 0);
  for (std::size_t flat = 0; flat < b.cell_count(); ++flat)
    for (int k = 0; k < 20; ++k)
      CHECK(b.flat_index(b.sample_in_cell(flat, rng)) == flat);
}

TEST_CASE("binning validation") {
  Binning b = Binning::regular_1d(0.0, 1.0, 4);
  CHECK_NOTHROW(b.validate());
  b.cells = {0};
  CHECK_THROWS_AS(b.validate(), ConfigError);
  b.cells = {4, 2};
  CHECK_THROWS_AS(b.validate(), ConfigError);
  CHECK_THROWS_AS(Binning::regular_1d(1.0, 0.0, 4), ConfigError);

  Binning nw = Binning::regular_1d(0.0, 1.0, 4);
  nw.width = scalar_vec(0.0);
  CHECK_THROWS_AS(nw.validate(), ConfigError);

  const Binning same = Binning::regular_1d(0.0, 1.0, 4);
  CHECK(same.same_spec(Binning::regular_1d(0.0, 1.0, 4)));
  CHECK_FALSE(same.same_spec(Binning::regular_1d(0.0, 1.0, 5)));
  CHECK_FALSE(same.same_spec(Binning::regular_1d(0.1, 1.1, 4)));
}

TEST_CASE("law from samples and its validation") {
  const Binning b = Binning::regular_1d(0.0, 1.0, 10);
  const std::vector<Vec> samples{scalar_vec(0.05), scalar_vec(0.15), scalar_vec(0.15),
                                 scalar_vec(2.0)};
  const EmpiricalLaw law = law_from_samples(samples, b);
  CHECK(law.sample_count == 4);
  CHECK(law.masses[0] == doctest::Approx(0.25));
  CHECK(law.masses[1] == doctest::Approx(0.5));
  CHECK(law.out_of_range_mass() == doctest::Approx(0.25));
  CHECK_NOTHROW(law.validate());

  EmpiricalLaw broken = law;
  broken.masses[0] = 0.5;
  CHECK_THROWS_AS(broken.validate(), ConfigError);
  broken.masses[0] = -0.25;
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  CHECK_THROWS_AS(law_from_samples({}, b), ConfigError);
}

TEST_CASE("conditional moments over in-range cells") {
  const Binning b = Binning::regular_1d(0.0, 2.0, 2);
  EmpiricalLaw law;
  law.binning = b;
  law.masses = {0.25, 0.75, 0.0};
  law.sample_count = 4;
  // Centers 0.5 and 1.5: mean 1.25, variance 0.1875.
  CHECK(law_mean(law) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(law_variance(law) == doctest::Approx(0.1875).epsilon(1e-14));

  // Out-of-range mass renormalizes away.
  EmpiricalLaw partial;
  partial.binning = b;
  partial.masses = {0.125, 0.375, 0.5};
  partial.sample_count = 8;
  CHECK(law_mean(partial) == doctest::Approx(1.25).epsilon(1e-14));

  EmpiricalLaw empty;
  empty.binning = b;
  empty.masses = {0.0, 0.0, 1.0};
  empty.sample_count = 1;
  CHECK_THROWS_AS(law_mean(empty), ConfigError);
}

TEST_CASE("tv distance on hand laws") {
  const Binning b = Binning::regular_1d(0.0, 3.0, 3);
  EmpiricalLaw p, q;
  p.binning = q.binning = b;
  p.masses = {0.5, 0.5, 0.0, 0.0};
  q.masses = {0.0, 0.5, 0.5, 0.0};
  p.sample_count = q.sample_count = 2;
  CHECK(tv_distance(p, q) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tv_distance(p, p) == 0.0);

  EmpiricalLaw other;
  other.binning = Binning::regular_1d(0.0, 3.0, 4);
  other.masses = {0.25, 0.25, 0.25, 0.25, 0.0};
  other.sample_count = 4;
  CHECK_THROWS_AS(tv_distance(p, other), ConfigError);
}

TEST_CASE("sample_from_law folds out-of-range mass back inside") {
  const Binning b = Binning::regular_1d(0.0, 2.0, 2);
  EmpiricalLaw law;
  law.binning = b;
  law.masses = {0.3, 0.2, 0.5};
  law.sample_count = 10;

  Rng rng(79, 1, 0);
  int low = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Vec x = sample_from_law(law, rng);
    REQUIRE(x[0] >= 0.0);
    REQUIRE(x[0] < 2.0);
    if (x[0] < 1.0) ++low;
  }
  // Conditional in-range split is 0.6 / 0.4.
  CHECK(std::abs(double(low) / n - 0.6) < 3.0 * std::sqrt(0.6 * 0.4 / n));

  Rng r1(79, 1, 1), r2(79, 1, 1);
  CHECK(sample_from_law(law, r1)[0] == sample_from_law(law, r2)[0]);
}

TEST_CASE("estimate_law at t = 0 rebins the start") {
  const Model model = jump_ou();
  const Binning b = Binning::regular_1d(-2.0, 8.0, 100);
  SimParams params;
  params.n_paths = 500;
  const EmpiricalLaw law = estimate_law(model, scalar_vec(0.5), 0.0, params, b);
  CHECK(law.sample_count == 500);
  CHECK(law.masses[b.flat_index(scalar_vec(0.5))] == 1.0);
  CHECK_NOTHROW(law.validate());
}

TEST_CASE("estimate_law is scheduling-invariant and stream-addressed") {
  const Model model = jump_ou();
  const Binning b = Binning::regular_1d(-2.0, 8.0, 50);
  SimParams params;
  params.dt = 0.01;
  params.horizon = 1.0;
  params.seed = 101;
  params.n_paths = 400;

  params.workers = 1;
  const EmpiricalLaw serial = estimate_law(model, scalar_vec(0.0), 1.0, params, b);
  params.workers = 4;
  const EmpiricalLaw parallel = estimate_law(model, scalar_vec(0.0), 1.0, params, b);
  REQUIRE(serial.masses.size() == parallel.masses.size());
  for (std::size_t i = 0; i < serial.masses.size(); ++i)
    CHECK(serial.masses[i] == parallel.masses[i]);

  // A different stream offset gives a genuinely different histogram.
  const EmpiricalLaw shifted =
      estimate_law(model, scalar_vec(0.0), 1.0, params, b, stream::kLawX, 1000);
  double l1 = 0.0;
  for (std::size_t i = 0; i < serial.masses.size(); ++i)
    l1 += std::abs(serial.masses[i] - shifted.masses[i]);
  CHECK(l1 > 0.0);

  // Drawing starts from a law is reproducible.
  EmpiricalLaw start;
  start.binning = b;
  start.masses.assign(b.cell_count() + 1, 0.0);
  start.masses[b.flat_index(scalar_vec(0.0))] = 1.0;
  start.sample_count = 1;
  const EmpiricalLaw from_law_a = estimate_law(model, start, 1.0, params, b);
  const EmpiricalLaw from_law_b = estimate_law(model, start, 1.0, params, b);
  for (std::size_t i = 0; i < from_law_a.masses.size(); ++i)
    CHECK(from_law_a.masses[i] == from_law_b.masses[i]);

  CHECK_THROWS_AS(estimate_law(model, scalar_vec(0.0), -1.0, params, b), ConfigError);
}

TEST_CASE("estimate_law sends exploded paths to the out cell") {
  const Model cubic =
      make_model("poly1d", {{"coeffs", {0.0, 0.0, 1.0}}}, LevyMeasure{});
  const Binning b = Binning::regular_1d(-100.0, 100.0, 10);
  SimParams params;
  params.dt = 0.001;
  params.horizon = 2.0;
  params.n_paths = 8;
  const EmpiricalLaw law = estimate_law(cubic, scalar_vec(10.0), 2.0, params, b);
  CHECK(law.out_of_range_mass() == 1.0);
}
