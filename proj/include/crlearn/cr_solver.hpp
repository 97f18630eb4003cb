#pragma once

#include "crlearn/nelder_mead.hpp"
#include "crlearn/types.hpp"

namespace crlearn {

struct InnerSolverConfig {
  int max_iters = 200;
  double tol = 1e-9;  // max-norm of the weighted moment residual
  double backtrack_ratio = 0.5;

  void validate() const;
};

/// Outcome of the dual solve for lambda at a fixed beta. `converged` means
/// the weighted moment residual reached tol; `infeasible` flags an empty
/// feasible region (e.g. 0 outside the convex hull of the moment points).
struct InnerSolveResult {
  Vector lambda;
  double residual = 0.0;
  bool converged = false;
  bool infeasible = false;
  int iterations = 0;
};

/// Weighted moment residual F(lambda) = sum_i pi_i(lambda) g_i and its
/// Jacobian dF/dlambda, where pi_i follows the branch closed form tilted by
/// `weights` (uniform weights give the plain contrast probabilities).
struct MomentMap {
  Vector residual;
  Matrix jacobian;
};

// --- weighted core, shared with the kernel-localized solver ---------------

/// Branch closed form on a precomputed n x d_g moment matrix:
///   General: pi_i  proportional to  w_i (1 + lambda.g_i)^{1/gamma}
///   EL:      pi_i  proportional to  w_i / (1 + lambda.g_i)
///   ET:      pi_i  proportional to  w_i exp(lambda.g_i)
/// Throws InfeasibleBase if a base 1 + lambda.g_i falls below the margin
/// (General and EL branches only).
Vector weighted_contrast_probabilities(const Matrix& g, const Vector& weights,
                                       const Vector& lambda,
                                       const CressieReadConfig& cfg);

MomentMap weighted_moment_map(const Matrix& g, const Vector& weights,
                              const Vector& lambda,
                              const CressieReadConfig& cfg);

/// Damped Newton on the weighted moment residual with a feasibility-
/// preserving backtracking line search. Non-convergence is reported through
/// the result flags, never thrown.
InnerSolveResult solve_weighted_lambda(const Matrix& g, const Vector& weights,
                                       const CressieReadConfig& cfg,
                                       const InnerSolverConfig& inner);

// --- public operations on observation / simulation data -------------------

/// Closed-form contrast probabilities for a given multiplier.
Vector contrast_probabilities(const DataMatrix& data, const Vector& beta,
                              const MomentModel& model, const Vector& lambda,
                              const CressieReadConfig& cfg);

/// Solve for the multiplier that makes the weighted moment condition vanish
/// at a fixed beta.
InnerSolveResult solve_lambda(const DataMatrix& data, const Vector& beta,
                              const MomentModel& model,
                              const CressieReadConfig& cfg,
                              const InnerSolverConfig& inner);

/// Full minimum-discrepancy fit: the inner dual solve profiles the
/// probabilities out for each beta, Nelder-Mead searches beta. Profile values
/// where the inner solve fails are +infinity so the simplex retreats.
/// Throws NoFeasibleBeta when every evaluated beta fails.
ContrastSolution fit(const DataMatrix& data, const MomentModel& model,
                     const CressieReadConfig& cfg,
                     const InnerSolverConfig& inner,
                     const NelderMeadConfig& nm, const Vector& beta_init);

}  // namespace crlearn
