#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace jumplab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Numeric policy shared by every module.
inline constexpr double kNumericZero = 1e-12;      // threshold for "!= 0" predicates
inline constexpr double kSvdRelTol = 1e-9;         // relative rank tolerance
inline constexpr double kCondCutoff = 1e12;        // condition-number cutoff for inverses
inline constexpr double kOverflowBound = 1e15;     // state norm beyond which a path counts as exploded
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Configuration and precondition problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric divergence (infinite rates, divergent compensators, explosions);
// the CLI maps these to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline Vec scalar_vec(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

}  // namespace jumplab
