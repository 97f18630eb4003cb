#pragma once

#include <optional>
#include <vector>

#include "crlearn/cr_solver.hpp"
#include "crlearn/types.hpp"

namespace crlearn {

enum class KernelKind { Gaussian, Epanechnikov, Uniform };
enum class BandwidthRule { Fixed, SilvermanRule };

struct KernelConfig {
  KernelKind kernel = KernelKind::Gaussian;
  double bandwidth = 1.0;
  BandwidthRule bandwidth_rule = BandwidthRule::SilvermanRule;

  void validate() const;
};

/// Row-stochastic n x n kernel weight matrix over the observation data.
struct KernelWeightMatrix {
  Matrix w;

  Index size() const { return w.rows(); }
  void validate() const;
};

/// Indicator of the observation subset the inference is restricted to.
struct SubsetMask {
  std::vector<bool> selected;

  Index size() const { return static_cast<Index>(selected.size()); }
  Index count() const;
  static SubsetMask all(Index n);
};

/// Kernel-localized contrast solution: one probability row and one
/// multiplier per observation, a shared beta, and per-row diagnostics.
struct LocalContrastSolution {
  Matrix pi;       // n x n, rows on the simplex
  Matrix lambdas;  // n x d_g
  Vector beta;
  bool converged = false;
  std::vector<Index> failed_rows;
};

struct LocalFitOptions {
  // Reproduce the literal linear row form (coincides with the general
  // branch at gamma = 1) instead of the exponent-1/gamma form.
  bool printed_form = false;
  bool parallel_rows = false;
};

/// Silverman's rule-of-thumb bandwidth on the observation data.
double silverman_bandwidth(const DataMatrix& obs);

/// Nadaraya-Watson style weights w_ij = psi((y_i - y_j)/h) / sum_k psi(...).
/// Multidimensional arguments use product kernels.
KernelWeightMatrix kernel_weights(const DataMatrix& obs, const KernelConfig& cfg);

/// Row solves at a fixed beta: for each selected row i find lambda_i making
/// the kernel-weighted moment condition vanish; unselected rows keep
/// pi_ij = w_ij. `objective` is the aggregate local discrepancy over the
/// selected rows (+inf when any selected row fails).
struct LocalRowsResult {
  Matrix pi;
  Matrix lambdas;
  std::vector<Index> failed_rows;
  double objective = 0.0;
};

LocalRowsResult solve_local_rows(const Matrix& g_sim,
                                 const KernelWeightMatrix& weights,
                                 const std::optional<SubsetMask>& mask,
                                 const CressieReadConfig& cfg,
                                 const InnerSolverConfig& inner,
                                 const LocalFitOptions& options = {});

/// Local minimum-discrepancy fit under conditional moment restrictions:
/// inner row solves profile the probabilities out, Nelder-Mead searches the
/// shared beta over the (masked) aggregate objective.
LocalContrastSolution fit_local(const DataMatrix& obs, const DataMatrix& sim,
                                const MomentModel& model,
                                const CressieReadConfig& cfg,
                                const KernelConfig& kcfg,
                                const std::optional<SubsetMask>& mask,
                                const InnerSolverConfig& inner,
                                const NelderMeadConfig& nm,
                                const Vector& beta_init,
                                const LocalFitOptions& options = {});

/// Same, with precomputed weights (forced-uniform tests, repeated fits
/// against fixed observations).
LocalContrastSolution fit_local_weighted(const KernelWeightMatrix& weights,
                                         const DataMatrix& sim,
                                         const MomentModel& model,
                                         const CressieReadConfig& cfg,
                                         const std::optional<SubsetMask>& mask,
                                         const InnerSolverConfig& inner,
                                         const NelderMeadConfig& nm,
                                         const Vector& beta_init,
                                         const LocalFitOptions& options = {});

}  // namespace crlearn
