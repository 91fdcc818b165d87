#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "jumplab/common.hpp"
#include "jumplab/levy.hpp"

namespace jumplab {

// Case A: state-dependent jump coefficient c(x,u) with growth envelope
// ||c(x,u)|| <= psi_star(x)·||u||. Case B: additive noise, m = d, c(x,u) = u.
enum class JumpCase { kA, kB };

struct Model {
  int m = 1;
  int d = 1;
  JumpCase jump_case = JumpCase::kB;
  std::function<Vec(const Vec&)> drift;
  std::function<Mat(const Vec&)> drift_jacobian;
  std::function<Vec(const Vec&, const Vec&)> jump;             // c(x,u)
  std::function<Mat(const Vec&, const Vec&)> jump_jacobian_x;  // grad_x c; zero in case B
  std::function<double(const Vec&)> psi_star;                  // case A growth envelope
  LevyMeasure measure;
  std::string name;
  std::map<std::string, std::vector<double>> params;
  // Truncation handed to effective_drift when delta() rewrites the drift; +inf
  // leaves the registered drift untouched (the registered drift already plays
  // the role of the between-jump field).
  double delta_truncation = kInf;

  // Spot-checks the case invariants on random (x,u) pairs; throws ConfigError.
  void validate() const;
};

// Registry of named models accepted in scenario configs:
//   ou_jump {theta[,dim]}        a(x) = -theta·x, case B
//   poly1d {coeffs}              scalar polynomial drift, case B
//   linear_nd {matrix}           a(x) = M·x (row-major square matrix), case B
//   example_5_1 {c}              plateau drift -c·h(x), case B
//   example_5_2 {}               two-sided trap drift with absorbing half-lines, case A
//   multiplicative_1d {theta,scale}  a(x) = -theta·x, c(x,u) = scale·x·u, case A
// An empty measure selects the model's built-in default where one exists.
Model make_model(const std::string& name,
                 const std::map<std::string, std::vector<double>>& params,
                 LevyMeasure measure);

std::vector<std::string> registry_names();

}  // namespace jumplab
