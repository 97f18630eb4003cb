#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "crlearn/errors.hpp"

namespace crlearn {

using Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Axis-aligned box, used for parameter bounds.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_, Vector hi_);

  Index dim() const { return lo.size(); }
  bool contains(const Vector& x) const;
  Vector midpoint() const { return 0.5 * (lo + hi); }

  /// Unbounded box of dimension d.
  static Box unbounded(Index d);
};

/// n x d_y matrix of observations or simulation outputs, one row per draw.
/// Immutable after construction; all entries are finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  Vector row(Index i) const { return values_.row(i).transpose(); }

 private:
  Matrix values_;
};

/// Moment restriction g: R^{d_y} x R^{d_beta} -> R^{d_g} with E[g(y, beta)] = 0,
/// plus the admissible parameter box.
struct MomentModel {
  Index d_y = 0;
  Index d_beta = 0;
  Index d_g = 0;
  std::function<Vector(const Vector& y, const Vector& beta)> eval;
  Box beta_bounds;

  // Optional batch evaluator returning the n x d_g matrix of g(y_i, beta).
  // When unset, rows are evaluated one by one through `eval`.
  std::function<Matrix(const DataMatrix& data, const Vector& beta)> eval_all;
};

/// Evaluate g over every row of `data`; returns the n x d_g moment matrix.
Matrix evaluate_moments(const MomentModel& model, const DataMatrix& data,
                        const Vector& beta);

/// Branch selector for the discrepancy family. The gamma = 0 and gamma = -1
/// poles are handled by the explicit limit branches rather than numerically.
enum class LimitBranch {
  General,      // (1/(g(g+1))) sum[(N pi)^{g+1} - 1]
  EL_gamma0,    // -(1/N) sum log(N pi)
  ET_gammaNeg1  // sum pi log(N pi)
};

struct CressieReadConfig {
  double gamma = 1.0;
  LimitBranch limit_branch = LimitBranch::General;
  double feasibility_margin = 1e-10;

  static CressieReadConfig general(double gamma);
  static CressieReadConfig el();  // empirical likelihood limit
  static CressieReadConfig et();  // exponential tilting limit

  void validate() const;
};

/// Solution of one constrained discrepancy minimization: the contrast
/// probabilities, the post-substitution multiplier, the fitted moment
/// parameter and the achieved objective value.
struct ContrastSolution {
  Vector pi;
  Vector lambda;
  Vector beta;
  double discrepancy = 0.0;
  bool converged = false;
  double residual = 0.0;  // max-norm of the weighted moment condition
};

enum class SummaryVariant { Basic, MultiRep, Conditional, Subset, Blockwise };

const char* summary_variant_name(SummaryVariant v);

/// Scalar log-likelihood proxy: log-ratio of simulation-side to
/// observation-side contrast probabilities minus half the squared distance
/// between the fitted moment parameters.
struct LearnedStatistic {
  double value = 0.0;
  double log_ratio_term = 0.0;
  double distance_term = 0.0;
  SummaryVariant variant = SummaryVariant::Basic;
};

/// Simulation-model parameter together with its admissible region.
struct ThetaPoint {
  Vector theta;
  Box bounds;

  bool within_bounds() const { return bounds.contains(theta); }
};

/// Cressie-Read discrepancy between `pi` and the uniform vector 1/N
/// (general branch). Zero iff `pi` is uniform; throws on gamma poles and on
/// points more than 1e-10 outside the simplex.
double cr_objective(const Vector& pi, double gamma);

/// Branch-dispatching overload; the limit branches use the EL / ET
/// divergences listed on LimitBranch.
double cr_objective(const Vector& pi, const CressieReadConfig& cfg);

}  // namespace crlearn
