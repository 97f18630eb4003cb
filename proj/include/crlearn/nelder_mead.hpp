#pragma once

#include <functional>

#include "crlearn/types.hpp"

namespace crlearn {

struct NelderMeadConfig {
  double reflect = 1.0;
  double expand = 2.0;
  double contract = 0.5;
  double shrink = 0.5;
  int max_iters = 500;
  double f_tol = 1e-8;
  double initial_step = 0.1;  // per coordinate

  void validate() const;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  int restarts = 0;
  bool converged = false;  // spread fell below f_tol
};

/// Derivative-free simplex minimization. Infinite objective values are
/// admissible and push the simplex back into the feasible region. Vertices
/// are ordered lexicographically by (value, insertion order) so runs are
/// deterministic; a degenerate simplex (volume < 1e-14) is rebuilt around the
/// incumbent with halved steps, at most twice.
NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Vector&)>& objective, const Vector& x0,
    const NelderMeadConfig& cfg);

}  // namespace crlearn
