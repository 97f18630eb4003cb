#include "crlearn/local_conditional.hpp"

#include <cmath>
#include <limits>

#include "feasible_start.hpp"
#include "parallel_for.hpp"

namespace crlearn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void KernelConfig::validate() const {
  if (bandwidth_rule == BandwidthRule::Fixed && !(bandwidth > 0.0))
    throw Error(ErrorCode::InvalidConfig, "fixed bandwidth must be positive");
}

void KernelWeightMatrix::validate() const {
  if (w.rows() != w.cols() || w.rows() < 1)
    throw Error(ErrorCode::DomainError, "weight matrix must be square");
  for (Index i = 0; i < w.rows(); ++i) {
    double sum = 0.0;
    for (Index j = 0; j < w.cols(); ++j) {
      if (!(w(i, j) >= 0.0))
        throw Error(ErrorCode::DomainError, "negative kernel weight");
      sum += w(i, j);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw Error(ErrorCode::DomainError,
                  "weight row " + std::to_string(i) + " sums to " +
                      std::to_string(sum));
  }
}

Index SubsetMask::count() const {
  Index c = 0;
  for (bool b : selected)
    if (b) ++c;
  return c;
}

SubsetMask SubsetMask::all(Index n) {
  return SubsetMask{std::vector<bool>(static_cast<std::size_t>(n), true)};
}

double silverman_bandwidth(const DataMatrix& obs) {
  const Index n = obs.rows();
  const Index d = obs.cols();
  if (n < 2) return 1.0;
  double sd_sum = 0.0;
  for (Index j = 0; j < d; ++j) {
    const auto col = obs.values().col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / (n - 1);
    sd_sum += std::sqrt(var);
  }
  const double sd = sd_sum / d;
  if (!(sd > 0.0) || !std::isfinite(sd)) return 1.0;
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  return sd * std::pow(4.0 / ((dd + 2.0) * nd), 1.0 / (dd + 4.0));
}

namespace {

double product_kernel(KernelKind kind, const Vector& u) {
  switch (kind) {
    case KernelKind::Gaussian:
      return std::exp(-0.5 * u.squaredNorm());
    case KernelKind::Epanechnikov: {
      double v = 1.0;
      for (Index d = 0; d < u.size(); ++d) {
        const double t = 1.0 - u[d] * u[d];
        if (t <= 0.0) return 0.0;
        v *= 0.75 * t;
      }
      return v;
    }
    case KernelKind::Uniform: {
      double v = 1.0;
      for (Index d = 0; d < u.size(); ++d) {
        if (std::abs(u[d]) > 1.0) return 0.0;
        v *= 0.5;
      }
      return v;
    }
  }
  return 0.0;
}

}  // namespace

KernelWeightMatrix kernel_weights(const DataMatrix& obs,
                                  const KernelConfig& cfg) {
  cfg.validate();
  const Index n = obs.rows();
  const double h = cfg.bandwidth_rule == BandwidthRule::SilvermanRule
                       ? silverman_bandwidth(obs)
                       : cfg.bandwidth;
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i) {
    double denom = 0.0;
    for (Index j = 0; j < n; ++j) {
      const Vector u = (obs.row(i) - obs.row(j)) / h;
      w(i, j) = product_kernel(cfg.kernel, u);
      denom += w(i, j);
    }
    if (!(denom > 0.0))
      throw Error(ErrorCode::DegenerateRow,
                  "kernel row " + std::to_string(i) +
                      " has zero mass; bandwidth too small");
    w.row(i) /= denom;
  }
  KernelWeightMatrix out{std::move(w)};
  return out;
}

namespace {

// Local discrepancy of one probability row against its kernel weights,
// using the branch-matched divergence. Entries outside the weight support
// contribute nothing.
double row_divergence(const Vector& pi, const Vector& w,
                      const CressieReadConfig& cfg) {
  double acc = 0.0;
  switch (cfg.limit_branch) {
    case LimitBranch::General: {
      const double expo = cfg.gamma + 1.0;
      for (Index j = 0; j < w.size(); ++j) {
        if (w[j] <= 0.0) continue;
        const double ratio = pi[j] / w[j];
        if (ratio <= 0.0) {
          if (expo > 0.0) { acc += -w[j]; continue; }
          return kInf;
        }
        acc += w[j] * (std::pow(ratio, expo) - 1.0);
      }
      return acc / (cfg.gamma * expo);
    }
    case LimitBranch::EL_gamma0:
      for (Index j = 0; j < w.size(); ++j) {
        if (w[j] <= 0.0) continue;
        const double ratio = pi[j] / w[j];
        if (ratio <= 0.0) return kInf;
        acc -= w[j] * std::log(ratio);
      }
      return acc;
    case LimitBranch::ET_gammaNeg1:
      for (Index j = 0; j < w.size(); ++j) {
        if (w[j] <= 0.0 || pi[j] <= 0.0) continue;
        acc += pi[j] * std::log(pi[j] / w[j]);
      }
      return acc;
  }
  return kInf;
}

CressieReadConfig row_config(const CressieReadConfig& cfg,
                             const LocalFitOptions& options) {
  if (!options.printed_form) return cfg;
  CressieReadConfig linear = cfg;
  linear.limit_branch = LimitBranch::General;
  linear.gamma = 1.0;
  return linear;
}

void check_mask(const std::optional<SubsetMask>& mask, Index n) {
  if (!mask) return;
  if (mask->size() != n)
    throw Error(ErrorCode::LengthMismatch, "mask length does not match data");
  if (mask->count() == 0)
    throw Error(ErrorCode::EmptyMask, "subset mask selects no observation");
}

}  // namespace

LocalRowsResult solve_local_rows(const Matrix& g_sim,
                                 const KernelWeightMatrix& weights,
                                 const std::optional<SubsetMask>& mask,
                                 const CressieReadConfig& cfg,
                                 const InnerSolverConfig& inner,
                                 const LocalFitOptions& options) {
  const Index n = weights.size();
  if (g_sim.rows() != n)
    throw Error(ErrorCode::LengthMismatch, "moment rows/weight size mismatch");
  check_mask(mask, n);
  const CressieReadConfig rcfg = row_config(cfg, options);

  LocalRowsResult result;
  result.pi.resize(n, n);
  result.lambdas = Matrix::Zero(n, g_sim.cols());
  std::vector<double> row_obj(static_cast<std::size_t>(n), 0.0);
  std::vector<char> failed(static_cast<std::size_t>(n), 0);

  detail::parallel_for(static_cast<std::size_t>(n), options.parallel_rows,
                       [&](std::size_t idx) {
    const Index i = static_cast<Index>(idx);
    const Vector w_row = weights.w.row(i).transpose();
    if (mask && !mask->selected[idx]) {
      // Unselected rows carry no moment constraint; the row term's
      // unconstrained minimizer is the kernel weights themselves.
      result.pi.row(i) = w_row.transpose();
      return;
    }
    InnerSolveResult solve = solve_weighted_lambda(g_sim, w_row, rcfg, inner);
    if (!solve.converged) {
      failed[idx] = 1;
      result.pi.row(i) = w_row.transpose();
      return;
    }
    Vector pi_row =
        weighted_contrast_probabilities(g_sim, w_row, solve.lambda, rcfg);
    result.lambdas.row(i) = solve.lambda.transpose();
    result.pi.row(i) = pi_row.transpose();
    row_obj[idx] = row_divergence(pi_row, w_row, cfg);
  });

  double total = 0.0;
  bool any_failed = false;
  for (Index i = 0; i < n; ++i) {
    if (failed[static_cast<std::size_t>(i)]) {
      any_failed = true;
      result.failed_rows.push_back(i);
    }
    if (!mask || mask->selected[static_cast<std::size_t>(i)])
      total += row_obj[static_cast<std::size_t>(i)];
  }
  result.objective = any_failed || !std::isfinite(total) ? kInf : total;
  return result;
}

LocalContrastSolution fit_local_weighted(const KernelWeightMatrix& weights,
                                         const DataMatrix& sim,
                                         const MomentModel& model,
                                         const CressieReadConfig& cfg,
                                         const std::optional<SubsetMask>& mask,
                                         const InnerSolverConfig& inner,
                                         const NelderMeadConfig& nm,
                                         const Vector& beta_init,
                                         const LocalFitOptions& options) {
  cfg.validate();
  inner.validate();
  weights.validate();
  if (weights.size() != sim.rows())
    throw Error(ErrorCode::LengthMismatch,
                "weights and simulation data disagree on n");
  check_mask(mask, sim.rows());
  if (!model.beta_bounds.contains(beta_init))
    throw Error(ErrorCode::InvalidConfig, "beta_init outside beta_bounds");

  auto profile = [&](const Vector& beta) -> double {
    if (!model.beta_bounds.contains(beta)) return kInf;
    Matrix g;
    try {
      g = evaluate_moments(model, sim, beta);
    } catch (const Error&) {
      return kInf;
    }
    if (!g.allFinite()) return kInf;
    return solve_local_rows(g, weights, mask, cfg, inner, options).objective;
  };

  const Vector start = detail::bootstrap_feasible_start(
      profile, beta_init, model.beta_bounds, nm.initial_step);
  if (start.size() == 0)
    throw Error(ErrorCode::NoConvergence,
                "local row solves failed at every probed beta");
  NelderMeadResult nm_res = nelder_mead_minimize(profile, start, nm);
  Matrix g = evaluate_moments(model, sim, nm_res.x);
  LocalRowsResult rows = solve_local_rows(g, weights, mask, cfg, inner, options);
  if (!std::isfinite(nm_res.value)) {
    std::string detail = "local fit failed";
    if (!rows.failed_rows.empty()) {
      detail += "; rows without converged row solve:";
      for (Index i : rows.failed_rows) detail += " " + std::to_string(i);
    }
    throw Error(ErrorCode::NoConvergence, detail);
  }

  LocalContrastSolution sol;
  sol.pi = std::move(rows.pi);
  sol.lambdas = std::move(rows.lambdas);
  sol.beta = nm_res.x;
  sol.failed_rows = rows.failed_rows;
  sol.converged = rows.failed_rows.empty();
  return sol;
}

LocalContrastSolution fit_local(const DataMatrix& obs, const DataMatrix& sim,
                                const MomentModel& model,
                                const CressieReadConfig& cfg,
                                const KernelConfig& kcfg,
                                const std::optional<SubsetMask>& mask,
                                const InnerSolverConfig& inner,
                                const NelderMeadConfig& nm,
                                const Vector& beta_init,
                                const LocalFitOptions& options) {
  if (obs.rows() != sim.rows())
    throw Error(ErrorCode::LengthMismatch,
                "observation and simulation data disagree on n");
  KernelWeightMatrix weights = kernel_weights(obs, kcfg);
  return fit_local_weighted(weights, sim, model, cfg, mask, inner, nm,
                            beta_init, options);
}

}  // namespace crlearn
