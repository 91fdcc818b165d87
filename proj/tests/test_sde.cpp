#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/model.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/sde.hpp"

using namespace jumplab;

namespace {

LevyMeasure unit_atom_measure() {
  LevyMeasure pi;
  pi.atoms.push_back({scalar_vec(1.0), 1.0});
  return pi;
}

Model ou_with_unit_atom(double theta = 1.0) {
  return make_model("ou_jump", {{"theta", {theta}}}, unit_atom_measure());
}

double phi2(const Vec& x) { return x.squaredNorm(); }
Vec grad_phi2(const Vec& x) { return 2.0 * x; }

}  // namespace

TEST_CASE("generator on the jump-OU quadratic is exact") {
  const Model model = ou_with_unit_atom();
  for (double x : {0.0, 1.0, 2.0}) {
    const double got = generator_apply(model, phi2, grad_phi2, scalar_vec(x));
    CHECK(std::abs(got - (-2.0 * x * x + 1.0)) < 1e-12);
  }
}

TEST_CASE("generator with a bounded diffuse tail matches the closed form") {
  LevyMeasure pi;
  pi.diffuse = Diffuse{};
  pi.diffuse->radial.coef = 2.0;
  pi.diffuse->radial.exponent = -2.0;
  pi.diffuse->radial.lo = 1.5;
  pi.diffuse->radial.hi = 3.0;
  pi.diffuse->directions.push_back({scalar_vec(1.0), 1.0});
  const Model model = make_model("ou_jump", {{"theta", {1.0}}}, pi);

  // A phi(x) = -2x^2 + int_{1.5}^{3} (2x rho + rho^2) 2 rho^-2 drho
  //          = -2x^2 + 4x ln 2 + 3.
  for (double x : {0.0, 1.0, -2.0}) {
    const double expected = -2.0 * x * x + 4.0 * x * std::log(2.0) + 3.0;
    const double got = generator_apply(model, phi2, grad_phi2, scalar_vec(x));
    CHECK(got == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("generator diverges on a heavy tail") {
  LevyMeasure pi;
  pi.diffuse = Diffuse{};
  pi.diffuse->radial.coef = 2.0;
  pi.diffuse->radial.exponent = -2.0;
  pi.diffuse->radial.lo = 1.0;
  pi.diffuse->radial.hi = kInf;
  pi.diffuse->directions.push_back({scalar_vec(1.0), 1.0});
  const Model model = make_model("ou_jump", {{"theta", {1.0}}}, pi);
  CHECK_THROWS_AS(generator_apply(model, phi2, grad_phi2, scalar_vec(1.0)), NumericError);
}

TEST_CASE("effective drift subtracts the compensated shell") {
  LevyMeasure pi;
  pi.atoms.push_back({scalar_vec(0.5), 2.0});
  const Model model = make_model("ou_jump", {{"theta", {1.0}}}, pi);

  // Shell [0.25, 1] contains the atom: a_eff = -x - 2*0.5.
  CHECK(effective_drift(model, scalar_vec(3.0), 0.25)[0] ==
        doctest::Approx(-4.0).epsilon(1e-14));
  // Shell [0.75, 1] misses it.
  CHECK(effective_drift(model, scalar_vec(3.0), 0.75)[0] ==
        doctest::Approx(-3.0).epsilon(1e-14));
  // The shell comparison is inclusive at the atom norm.
  CHECK(effective_drift(model, scalar_vec(0.0), 0.5)[0] ==
        doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("flow field adds back the dropped small-jump mean") {
  LevyMeasure pi;
  pi.atoms.push_back({scalar_vec(0.5), 2.0});
  const Model model = make_model("ou_jump", {{"theta", {1.0}}}, pi);

  const FlowField plain(model, 0.0);
  CHECK(plain(scalar_vec(2.0))[0] == doctest::Approx(-2.0).epsilon(1e-14));

  // Truncation above the atom drops it from the event stream; its mean
  // displacement moves into the flow.
  const FlowField lifted(model, 0.75);
  CHECK(lifted(scalar_vec(2.0))[0] == doctest::Approx(-1.0).epsilon(1e-14));

  // Truncation below the atom leaves the flow untouched.
  const FlowField kept(model, 0.25);
  CHECK(kept(scalar_vec(2.0))[0] == doctest::Approx(-2.0).epsilon(1e-14));
}

TEST_CASE("rk4 flow integration is high-order accurate") {
  const Model model = make_model("ou_jump", {{"theta", {1.0}}}, LevyMeasure{});
  const FlowField field(model, 0.0);
  const Vec x1 = integrate_flow(field, scalar_vec(5.0), 0.0, 1.0, 0.01);
  CHECK(std::abs(x1[0] - 5.0 * std::exp(-1.0)) < 1e-8);
  CHECK_THROWS_AS(integrate_flow(field, scalar_vec(1.0), 0.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("simulate without jumps reduces to the flow") {
  const Model model = make_model("ou_jump", {{"theta", {1.0}}}, LevyMeasure{});
  SimParams params;
  params.dt = 0.01;
  params.horizon = 1.0;
  Rng rng(47, stream::kSimulate, 0);
  const SimOutcome out = simulate(model, scalar_vec(5.0), params, rng);
  CHECK_FALSE(out.exploded);
  CHECK(out.n_jumps == 0);
  CHECK(std::abs(out.terminal[0] - 5.0 * std::exp(-1.0)) < 1e-8);
}

TEST_CASE("simulate is deterministic and observers see t = 0 first") {
  const Model model = ou_with_unit_atom();
  SimParams params;
  params.dt = 0.01;
  params.horizon = 5.0;

  double first_time = -1.0;
  Vec first_state;
  bool got_first = false;
  Rng rng(49, stream::kSimulate, 0);
  const SimOutcome a = simulate(model, scalar_vec(2.0), params, rng,
                                [&](double t, const Vec& x) {
                                  if (!got_first) {
                                    first_time = t;
                                    first_state = x;
                                    got_first = true;
                                  }
                                });
  CHECK(first_time == 0.0);
  CHECK(first_state[0] == 2.0);

  Rng rng2(49, stream::kSimulate, 0);
  const SimOutcome b = simulate(model, scalar_vec(2.0), params, rng2);
  CHECK(a.terminal[0] == b.terminal[0]);
  CHECK(a.n_jumps == b.n_jumps);
}

TEST_CASE("explosive drift sets the explosion flag") {
  const Model model = make_model("poly1d", {{"coeffs", {0.0, 0.0, 1.0}}}, unit_atom_measure());
  SimParams params;
  params.dt = 0.001;
  params.horizon = 1.0;
  Rng rng(53, stream::kSimulate, 0);
  const SimOutcome out = simulate(model, scalar_vec(10.0), params, rng);
  CHECK(out.exploded);
  CHECK(out.explosion_time > 0.0);
  CHECK(out.explosion_time < 0.5);
}

TEST_CASE("trajectory skeleton carries pre and post jump nodes") {
  const Model model = ou_with_unit_atom();
  SimParams params;
  params.dt = 0.01;
  params.horizon = 5.0;
  Rng rng(59, stream::kSimulate, 3);
  const Trajectory traj = simulate_path(model, scalar_vec(2.0), params, rng);

  REQUIRE(!traj.times.empty());
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 5.0);
  CHECK_FALSE(traj.exploded);
  for (std::size_t i = 1; i < traj.times.size(); ++i)
    CHECK(traj.times[i] >= traj.times[i - 1]);

  REQUIRE(traj.jumps.size() > 0);
  REQUIRE(traj.jump_skeleton_index.size() == traj.jumps.size());
  for (std::size_t j = 0; j < traj.jumps.size(); ++j) {
    const std::size_t idx = traj.jump_skeleton_index[j];
    REQUIRE(idx > 0);
    REQUIRE(idx < traj.states.size());
    CHECK(traj.times[idx] == traj.jumps[j].time);
    CHECK(traj.times[idx - 1] == traj.jumps[j].time);
    CHECK(traj.states[idx][0] == traj.jumps[j].post[0]);
    CHECK(traj.states[idx - 1][0] == traj.jumps[j].pre[0]);
    CHECK(traj.jumps[j].post[0] == traj.jumps[j].pre[0] + 1.0);
  }
}

TEST_CASE("delta in the additive case is the drift increment") {
  const Model ou = make_model("ou_jump", {{"theta", {2.0}}}, unit_atom_measure());
  CHECK(delta(ou, scalar_vec(3.0), scalar_vec(0.5))[0] == doctest::Approx(-1.0).epsilon(1e-14));

  const Model poly =
      make_model("poly1d", {{"coeffs", {0.0, 1.0, 1.0}}}, unit_atom_measure());
  // a(x) = x + x^2: delta = u + 2xu + u^2 = 1.75 at x = 1, u = 0.5.
  CHECK(delta(poly, scalar_vec(1.0), scalar_vec(0.5))[0] ==
        doctest::Approx(1.75).epsilon(1e-12));

  const HatDelta hd = hat_delta(ou, scalar_vec(3.0), scalar_vec(0.5));
  CHECK(hd.invertible);
  CHECK(hd.condition == 1.0);
  CHECK(hd.value[0] == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("delta in the state-dependent case uses the corrected increment") {
  // Linear drift with a multiplicative jump commutes: delta vanishes.
  const Model mult = make_model("multiplicative_1d", {{"theta", {1.0}}, {"scale", {0.3}}},
                                unit_atom_measure());
  CHECK(std::abs(delta(mult, scalar_vec(2.0), scalar_vec(0.7))[0]) < 1e-12);

  // Hand-built cubic drift, c(x,u) = 0.5 x u: at x = 1, u = 0.4 the corrected
  // increment is -1.2^3 + 1 + 0.2 = -0.528.
  Model cubic;
  cubic.m = cubic.d = 1;
  cubic.jump_case = JumpCase::kA;
  cubic.drift = [](const Vec& x) { return scalar_vec(-x[0] * x[0] * x[0]); };
  cubic.drift_jacobian = [](const Vec& x) {
    Mat j(1, 1);
    j(0, 0) = -3.0 * x[0] * x[0];
    return j;
  };
  cubic.jump = [](const Vec& x, const Vec& u) { return scalar_vec(0.5 * x[0] * u[0]); };
  cubic.jump_jacobian_x = [](const Vec&, const Vec& u) {
    Mat j(1, 1);
    j(0, 0) = 0.5 * u[0];
    return j;
  };
  cubic.psi_star = [](const Vec& x) { return 0.5 * std::abs(x[0]); };
  cubic.measure.atoms.push_back({scalar_vec(0.1), 1.0});
  cubic.validate();

  CHECK(delta(cubic, scalar_vec(1.0), scalar_vec(0.4))[0] ==
        doctest::Approx(-0.528).epsilon(1e-12));
  const HatDelta hd = hat_delta(cubic, scalar_vec(1.0), scalar_vec(0.4));
  CHECK(hd.invertible);
  CHECK(hd.value[0] == doctest::Approx(-0.528 / 1.2).epsilon(1e-12));

  // 1 + grad_x c = 0 at u = -2 under scale 0.5: no usable inverse.
  const Model sing = make_model("multiplicative_1d", {{"theta", {1.0}}, {"scale", {0.5}}},
                                unit_atom_measure());
  const HatDelta bad = hat_delta(sing, scalar_vec(1.0), scalar_vec(-2.0));
  CHECK_FALSE(bad.invertible);
}

TEST_CASE("exponent propagation matches the matrix exponential") {
  const Model model = make_model(
      "linear_nd", {{"matrix", {-1.0, 0.5, 0.0, -2.0}}}, LevyMeasure{});
  SimParams params;
  params.dt = 0.001;
  params.horizon = 1.0;
  Rng rng(61, stream::kSimulate, 0);
  Vec x0(2);
  x0 << 1.0, 1.0;
  const Trajectory traj = simulate_path(model, x0, params, rng);
  const ExponentLog log = propagate_exponent(model, traj);

  REQUIRE(log.E0t.size() == traj.times.size());
  CHECK(log.at_jumps.empty());

  Mat expected(2, 2);
  const double e1 = std::exp(-1.0), e2 = std::exp(-2.0);
  expected << e1, 0.5 * (e1 - e2), 0.0, e2;
  CHECK((log.E0t.back() - expected).norm() < 1e-9);
}

TEST_CASE("influence vectors carry the decayed jump response") {
  const Model model = ou_with_unit_atom();
  SimParams params;
  params.dt = 0.001;
  params.horizon = 2.0;
  Rng rng(67, stream::kSimulate, 5);
  const Trajectory traj = simulate_path(model, scalar_vec(0.0), params, rng);
  REQUIRE(traj.jumps.size() > 0);

  const ExponentLog log = propagate_exponent(model, traj);
  // Case B leaves the exponent untouched at jumps.
  for (const auto& pair : log.at_jumps) CHECK((pair.pre - pair.post).norm() == 0.0);

  const InfluenceVectors infl = jump_influence_vectors(model, traj, log, 2.0);
  std::size_t expected_count = 0;
  for (const auto& rec : traj.jumps)
    if (rec.time < 2.0) ++expected_count;
  CHECK(infl.vectors.size() == expected_count);
  CHECK(infl.excluded_jump_count == 0);
  for (std::size_t j = 0; j < infl.vectors.size(); ++j) {
    const double expected = -std::exp(-(2.0 - traj.jumps[j].time));
    CHECK(infl.vectors[j][0] == doctest::Approx(expected).epsilon(1e-6));
  }

  CHECK_THROWS_AS(jump_influence_vectors(model, traj, log, 3.0), ConfigError);
}

TEST_CASE("model registry interpolants honor their envelopes") {
  SUBCASE("plateau drift is constant beyond the ramp") {
    const Model m51 = make_model("example_5_1", {{"c", {0.5}}}, LevyMeasure{});
    for (double x : {1.0, 1.5, 4.0, 100.0}) {
      CHECK(m51.drift(scalar_vec(x))[0] == -0.5);
      CHECK(m51.drift(scalar_vec(-x))[0] == -0.5);
    }
    CHECK(m51.drift(scalar_vec(0.0))[0] == 0.0);
    // C1 join at the plateau edge.
    CHECK(std::abs(m51.drift(scalar_vec(1.0 - 1e-5))[0] + 0.5) < 1e-8);
    CHECK(std::abs(m51.drift_jacobian(scalar_vec(1.0 - 1e-5))(0, 0)) < 1e-3);
    CHECK(m51.drift_jacobian(scalar_vec(1.0))(0, 0) == 0.0);
    // Default measure drifts upward at unit rate: atoms +1 (weight 2), -1 (weight 1).
    REQUIRE(m51.measure.atoms.size() == 2);
    double net = 0.0;
    for (const auto& atom : m51.measure.atoms) net += atom.weight * atom.mark[0];
    CHECK(net == 1.0);
    CHECK_THROWS_AS(make_model("example_5_1", {{"c", {1.5}}}, LevyMeasure{}), ConfigError);
  }
  SUBCASE("trap drift and switch coefficient") {
    const Model m52 = make_model("example_5_2", {}, LevyMeasure{});
    CHECK(m52.jump_case == JumpCase::kA);
    for (double x = -0.995; x <= 1.0; x += 0.05)
      CHECK(m52.drift(scalar_vec(x))[0] == 0.0);
    for (double x : {2.0, 3.0, 7.5}) {
      CHECK(m52.drift(scalar_vec(x))[0] == doctest::Approx(-x).epsilon(1e-14));
      CHECK(m52.drift(scalar_vec(-x))[0] == doctest::Approx(x).epsilon(1e-14));
      CHECK(m52.jump(scalar_vec(x), scalar_vec(0.7))[0] ==
            doctest::Approx(0.7).epsilon(1e-14));
      CHECK(m52.jump(scalar_vec(-x), scalar_vec(0.7))[0] ==
            doctest::Approx(-0.7).epsilon(1e-14));
    }
    // Jumps never push toward the opposite half-line.
    for (double x = -4.0; x <= 4.0; x += 0.01)
      CHECK(x * m52.jump(scalar_vec(x), scalar_vec(1.0))[0] >= 0.0);
    REQUIRE(m52.measure.atoms.size() == 1);
    CHECK(m52.measure.atoms[0].mark[0] == 1.0);
  }
}

TEST_CASE("model and parameter validation") {
  CHECK_THROWS_AS(make_model("unknown_model", {}, LevyMeasure{}), ConfigError);
  CHECK(registry_names().size() == 6);

  // Case B demands c(x,u) = u.
  Model broken = make_model("ou_jump", {{"theta", {1.0}}}, unit_atom_measure());
  broken.jump = [](const Vec&, const Vec& u) { return Vec(2.0 * u); };
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  // Measure dimension must match d.
  LevyMeasure two_d;
  Vec mark(2);
  mark << 1.0, 0.0;
  two_d.atoms.push_back({mark, 1.0});
  CHECK_THROWS_AS(make_model("poly1d", {{"coeffs", {0.0, -1.0}}}, two_d), ConfigError);

  SimParams params;
  params.dt = 0.0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.dt = 0.01;
  params.horizon = -1.0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.horizon = 1.0;
  params.n_paths = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.n_paths = 1;
  params.workers = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.workers = 1;
  CHECK_NOTHROW(params.validate());

  const Model ou = ou_with_unit_atom();
  Rng rng(71, stream::kSimulate, 0);
  Vec wrong(2);
  wrong << 1.0, 2.0;
  CHECK_THROWS_AS(simulate(ou, wrong, params, rng), ConfigError);
}
