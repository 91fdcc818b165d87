#include "jumplab/model.hpp"

#include <cmath>

#include "jumplab/rng.hpp"

namespace jumplab {

namespace {

double poly_eval(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
  return v;
}

double poly_deriv(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) v = v * x + coeffs[i] * static_cast<double>(i);
  return v;
}

// Even C1 ramp: x^2(3-2|x|) on |x| <= 1, plateau 1 beyond.
double plateau(double x) {
  const double ax = std::abs(x);
  if (ax >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * ax);
}

double plateau_deriv(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return 6.0 * x - 6.0 * x * std::abs(x);
}

// Odd C1 switch: 0 at 0, sign(x) for |x| >= 2, cubic blend s(t)=3t^2-2t^3 of t=|x|/2.
double odd_switch(double x) {
  const double t = std::min(std::abs(x) / 2.0, 1.0);
  const double s = t * t * (3.0 - 2.0 * t);
  return x < 0.0 ? -s : s;
}

double odd_switch_deriv(double x) {
  const double t = std::abs(x) / 2.0;
  if (t >= 1.0) return 0.0;
  return (6.0 * t - 6.0 * t * t) * 0.5;
}

// Odd C1 trap drift: 0 on |x|<=1, -x for |x|>=2, Hermite blend between.
double trap_drift(double x) {
  const double ax = std::abs(x);
  double v;
  if (ax <= 1.0)
    v = 0.0;
  else if (ax >= 2.0)
    v = -ax;
  else {
    const double t = ax - 1.0;
    v = -5.0 * t * t + 3.0 * t * t * t;
  }
  return x < 0.0 ? -v : v;
}

double trap_drift_deriv(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return 0.0;
  if (ax >= 2.0) return -1.0;
  const double t = ax - 1.0;
  return -10.0 * t + 9.0 * t * t;
}

Mat zero_mat(int m) { return Mat::Zero(m, m); }

void set_case_b(Model& model) {
  model.jump_case = JumpCase::kB;
  const int m = model.m;
  model.jump = [](const Vec&, const Vec& u) { return u; };
  model.jump_jacobian_x = [m](const Vec&, const Vec&) { return zero_mat(m); };
  model.psi_star = [](const Vec&) { return 1.0; };
}

double require_scalar(const std::map<std::string, std::vector<double>>& params,
                      const std::string& key, const char* model_name) {
  auto it = params.find(key);
  if (it == params.end() || it->second.size() != 1)
    throw ConfigError(std::string(model_name) + ": parameter '" + key +
                      "' must be a single number");
  return it->second.front();
}

double scalar_or(const std::map<std::string, std::vector<double>>& params,
                 const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1)
    throw ConfigError("parameter '" + key + "' must be a single number");
  return it->second.front();
}

LevyMeasure two_one_sided_atoms() {
  LevyMeasure pi;
  pi.atoms.push_back({scalar_vec(1.0), 2.0});
  pi.atoms.push_back({scalar_vec(-1.0), 1.0});
  return pi;
}

LevyMeasure unit_atom() {
  LevyMeasure pi;
  pi.atoms.push_back({scalar_vec(1.0), 1.0});
  return pi;
}

}  // namespace

void Model::validate() const {
  if (m < 1 || d < 1) throw ConfigError("Model: dimensions must be positive");
  if (!drift || !drift_jacobian || !jump || !jump_jacobian_x)
    throw ConfigError("Model: missing coefficient functions");
  measure.validate();
  if (!measure.empty() && measure.dim() != d)
    throw ConfigError("Model: measure dimension does not match d");
  if (jump_case == JumpCase::kB && m != d)
    throw ConfigError("Model: case B requires m = d");
  if (jump_case == JumpCase::kA && !psi_star)
    throw ConfigError("Model: case A requires psi_star");

  Rng rng(0xC0FFEEULL, 0, 0);
  for (int trial = 0; trial < 32; ++trial) {
    Vec x(m), u(d);
    for (int i = 0; i < m; ++i) x[i] = 3.0 * rng.normal();
    for (int i = 0; i < d; ++i) u[i] = 3.0 * rng.normal();
    const Vec c = jump(x, u);
    if (static_cast<int>(c.size()) != m)
      throw ConfigError("Model: jump coefficient has wrong dimension");
    if (jump_case == JumpCase::kB) {
      if ((c - u).norm() > 0.0)
        throw ConfigError("Model: case B requires c(x,u) = u");
      if (jump_jacobian_x(x, u).norm() > 0.0)
        throw ConfigError("Model: case B requires grad_x c = 0");
    } else {
      if (c.norm() > psi_star(x) * u.norm() + kNumericZero)
        throw ConfigError("Model: jump coefficient violates its psi_star envelope");
    }
    const Vec a = drift(x);
    if (static_cast<int>(a.size()) != m)
      throw ConfigError("Model: drift has wrong dimension");
    const Mat ja = drift_jacobian(x);
    if (ja.rows() != m || ja.cols() != m)
      throw ConfigError("Model: drift Jacobian has wrong shape");
  }
}

Model make_model(const std::string& name,
                 const std::map<std::string, std::vector<double>>& params,
                 LevyMeasure measure) {
  Model model;
  model.name = name;
  model.params = params;
  model.measure = std::move(measure);

  if (name == "ou_jump") {
    const double theta = scalar_or(params, "theta", 1.0);
    int m = model.measure.empty() ? static_cast<int>(scalar_or(params, "dim", 1.0))
                                  : model.measure.dim();
    model.m = model.d = m;
    model.params["theta"] = {theta};
    model.drift = [theta](const Vec& x) { return Vec(-theta * x); };
    model.drift_jacobian = [theta, m](const Vec&) { return Mat(-theta * Mat::Identity(m, m)); };
    set_case_b(model);
  } else if (name == "poly1d") {
    auto it = params.find("coeffs");
    if (it == params.end() || it->second.empty())
      throw ConfigError("poly1d: parameter 'coeffs' must be a nonempty list");
    const std::vector<double> coeffs = it->second;
    model.m = model.d = 1;
    model.drift = [coeffs](const Vec& x) { return scalar_vec(poly_eval(coeffs, x[0])); };
    model.drift_jacobian = [coeffs](const Vec& x) {
      Mat j(1, 1);
      j(0, 0) = poly_deriv(coeffs, x[0]);
      return j;
    };
    set_case_b(model);
  } else if (name == "linear_nd") {
    auto it = params.find("matrix");
    if (it == params.end() || it->second.empty())
      throw ConfigError("linear_nd: parameter 'matrix' must be a flattened square matrix");
    const int n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(it->second.size()))));
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != it->second.size())
      throw ConfigError("linear_nd: matrix length is not a perfect square");
    Mat M(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) M(r, c) = it->second[static_cast<std::size_t>(r) * n + c];
    model.m = model.d = n;
    model.drift = [M](const Vec& x) { return Vec(M * x); };
    model.drift_jacobian = [M](const Vec&) { return M; };
    set_case_b(model);
  } else if (name == "example_5_1") {
    const double c = require_scalar(params, "c", "example_5_1");
    if (!(c > 0.0 && c < 1.0)) throw ConfigError("example_5_1: c must lie in (0,1)");
    model.m = model.d = 1;
    model.drift = [c](const Vec& x) { return scalar_vec(-c * plateau(x[0])); };
    model.drift_jacobian = [c](const Vec& x) {
      Mat j(1, 1);
      j(0, 0) = -c * plateau_deriv(x[0]);
      return j;
    };
    set_case_b(model);
    if (model.measure.empty()) model.measure = two_one_sided_atoms();
  } else if (name == "example_5_2") {
    model.m = model.d = 1;
    model.jump_case = JumpCase::kA;
    model.drift = [](const Vec& x) { return scalar_vec(trap_drift(x[0])); };
    model.drift_jacobian = [](const Vec& x) {
      Mat j(1, 1);
      j(0, 0) = trap_drift_deriv(x[0]);
      return j;
    };
    model.jump = [](const Vec& x, const Vec& u) { return scalar_vec(odd_switch(x[0]) * u[0]); };
    model.jump_jacobian_x = [](const Vec& x, const Vec& u) {
      Mat j(1, 1);
      j(0, 0) = odd_switch_deriv(x[0]) * u[0];
      return j;
    };
    model.psi_star = [](const Vec&) { return 1.0; };
    if (model.measure.empty()) model.measure = unit_atom();
  } else if (name == "multiplicative_1d") {
    const double theta = scalar_or(params, "theta", 1.0);
    const double scale = require_scalar(params, "scale", "multiplicative_1d");
    model.params["theta"] = {theta};
    model.m = model.d = 1;
    model.jump_case = JumpCase::kA;
    model.drift = [theta](const Vec& x) { return Vec(-theta * x); };
    model.drift_jacobian = [theta](const Vec&) {
      Mat j(1, 1);
      j(0, 0) = -theta;
      return j;
    };
    model.jump = [scale](const Vec& x, const Vec& u) { return scalar_vec(scale * x[0] * u[0]); };
    model.jump_jacobian_x = [scale](const Vec&, const Vec& u) {
      Mat j(1, 1);
      j(0, 0) = scale * u[0];
      return j;
    };
    model.psi_star = [scale](const Vec& x) { return std::abs(scale * x[0]); };
  } else {
    throw ConfigError("unknown model '" + name + "'");
  }

  model.validate();
  return model;
}

std::vector<std::string> registry_names() {
  return {"ou_jump", "poly1d", "linear_nd", "example_5_1", "example_5_2", "multiplicative_1d"};
}

}  // namespace jumplab
