#include "crlearn/cr_solver.hpp"

#include <cmath>
#include <limits>

#include "feasible_start.hpp"

namespace crlearn {

void InnerSolverConfig::validate() const {
  if (max_iters < 1) throw Error(ErrorCode::InvalidConfig, "max_iters < 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "tol must be positive");
  if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0))
    throw Error(ErrorCode::InvalidConfig, "backtrack_ratio must be in (0,1)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_weighted_inputs(const Matrix& g, const Vector& weights,
                           const Vector& lambda) {
  if (g.rows() != weights.size())
    throw Error(ErrorCode::LengthMismatch, "weights/moment row count mismatch");
  if (g.cols() != lambda.size())
    throw Error(ErrorCode::LengthMismatch, "lambda/moment column mismatch");
}

// Per-observation tilt s_i = lambda.g_i, feasibility of the base 1 + s_i,
// log phi_i, and the logistic factor c_i used by the Jacobian
// (d phi_i / d lambda = phi_i c_i g_i).
struct BranchEval {
  Vector s;
  Vector log_phi;
  Vector c;
  bool feasible = true;
};

BranchEval branch_eval(const Matrix& g, const Vector& lambda,
                       const CressieReadConfig& cfg) {
  BranchEval ev;
  ev.s = g * lambda;
  const Index n = ev.s.size();
  ev.log_phi.resize(n);
  ev.c.resize(n);
  switch (cfg.limit_branch) {
    case LimitBranch::General: {
      const double inv_gamma = 1.0 / cfg.gamma;
      for (Index i = 0; i < n; ++i) {
        const double base = 1.0 + ev.s[i];
        if (!(base >= cfg.feasibility_margin)) {
          ev.feasible = false;
          return ev;
        }
        ev.log_phi[i] = std::log1p(ev.s[i]) * inv_gamma;
        ev.c[i] = inv_gamma / base;
      }
      break;
    }
    case LimitBranch::EL_gamma0: {
      for (Index i = 0; i < n; ++i) {
        const double base = 1.0 + ev.s[i];
        if (!(base >= cfg.feasibility_margin)) {
          ev.feasible = false;
          return ev;
        }
        ev.log_phi[i] = -std::log1p(ev.s[i]);
        ev.c[i] = -1.0 / base;
      }
      break;
    }
    case LimitBranch::ET_gammaNeg1: {
      ev.log_phi = ev.s;
      ev.c.setOnes();
      break;
    }
  }
  return ev;
}

// pi from a feasible branch evaluation; shift by the max log phi over the
// weight support so the exponentials cannot overflow.
Vector probabilities_from(const BranchEval& ev, const Vector& weights) {
  const Index n = weights.size();
  double shift = -kInf;
  for (Index i = 0; i < n; ++i)
    if (weights[i] > 0.0 && ev.log_phi[i] > shift) shift = ev.log_phi[i];
  if (!std::isfinite(shift))
    throw Error(ErrorCode::DomainError, "weight vector has empty support");
  Vector t(n);
  for (Index i = 0; i < n; ++i)
    t[i] = weights[i] > 0.0 ? weights[i] * std::exp(ev.log_phi[i] - shift) : 0.0;
  const double total = t.sum();
  if (!(total > 0.0))
    throw Error(ErrorCode::DomainError, "contrast normalization underflowed");
  return t / total;
}

// True when some moment coordinate is strictly one-signed over the weight
// support, i.e. 0 is outside the convex hull and no simplex weighting can
// satisfy the constraint. Exact for d_g = 1, a cheap partial test otherwise.
bool hull_excludes_zero(const Matrix& g, const Vector& weights) {
  for (Index j = 0; j < g.cols(); ++j) {
    bool all_pos = true, all_neg = true;
    for (Index i = 0; i < g.rows(); ++i) {
      if (weights[i] <= 0.0) continue;
      if (g(i, j) <= 0.0) all_pos = false;
      if (g(i, j) >= 0.0) all_neg = false;
      if (!all_pos && !all_neg) break;
    }
    if (all_pos || all_neg) return true;
  }
  return false;
}

}  // namespace

Vector weighted_contrast_probabilities(const Matrix& g, const Vector& weights,
                                       const Vector& lambda,
                                       const CressieReadConfig& cfg) {
  cfg.validate();
  check_weighted_inputs(g, weights, lambda);
  BranchEval ev = branch_eval(g, lambda, cfg);
  if (!ev.feasible)
    throw Error(ErrorCode::InfeasibleBase,
                "base 1 + lambda.g fell below the feasibility margin");
  return probabilities_from(ev, weights);
}

MomentMap weighted_moment_map(const Matrix& g, const Vector& weights,
                              const Vector& lambda,
                              const CressieReadConfig& cfg) {
  cfg.validate();
  check_weighted_inputs(g, weights, lambda);
  BranchEval ev = branch_eval(g, lambda, cfg);
  if (!ev.feasible)
    throw Error(ErrorCode::InfeasibleBase,
                "base 1 + lambda.g fell below the feasibility margin");
  Vector pi = probabilities_from(ev, weights);
  MomentMap map;
  map.residual = g.transpose() * pi;
  Vector pc = pi.cwiseProduct(ev.c);
  map.jacobian = g.transpose() * pc.asDiagonal() * g -
                 map.residual * (g.transpose() * pc).transpose();
  return map;
}

InnerSolveResult solve_weighted_lambda(const Matrix& g, const Vector& weights,
                                       const CressieReadConfig& cfg,
                                       const InnerSolverConfig& inner) {
  cfg.validate();
  inner.validate();
  const Index d_g = g.cols();
  InnerSolveResult result;
  result.lambda = Vector::Zero(d_g);

  if (hull_excludes_zero(g, weights)) {
    result.infeasible = true;
    BranchEval ev0 = branch_eval(g, result.lambda, cfg);
    result.residual =
        (g.transpose() * probabilities_from(ev0, weights)).lpNorm<Eigen::Infinity>();
    return result;
  }

  Vector lambda = Vector::Zero(d_g);
  BranchEval ev = branch_eval(g, lambda, cfg);  // lambda = 0 is always feasible
  Vector pi = probabilities_from(ev, weights);
  Vector residual = g.transpose() * pi;
  double res_norm = residual.lpNorm<Eigen::Infinity>();

  result.lambda = lambda;
  result.residual = res_norm;

  const bool base_restricted = cfg.limit_branch != LimitBranch::ET_gammaNeg1;

  for (int iter = 0; iter < inner.max_iters; ++iter) {
    if (res_norm <= inner.tol) {
      result.converged = true;
      result.iterations = iter;
      return result;
    }

    Vector pc = pi.cwiseProduct(ev.c);
    Matrix jac = g.transpose() * pc.asDiagonal() * g -
                 residual * (g.transpose() * pc).transpose();
    Vector step = jac.fullPivLu().solve(-residual);
    if (!step.allFinite()) {
      result.iterations = iter;
      return result;  // singular map; report best residual, not converged
    }

    // Largest step keeping every base strictly inside the margin.
    double t = 1.0;
    if (base_restricted) {
      Vector ds = g * step;
      double t_max = kInf;
      for (Index i = 0; i < ds.size(); ++i) {
        if (weights[i] <= 0.0 || ds[i] >= 0.0) continue;
        const double room = (cfg.feasibility_margin - 1.0) - ev.s[i];
        t_max = std::min(t_max, room / ds[i]);
      }
      if (t_max <= 0.0) t_max = 0.0;
      t = std::min(1.0, 0.99 * t_max);
    }

    bool accepted = false;
    for (int bt = 0; bt < 60 && t > 0.0; ++bt) {
      Vector cand = lambda + t * step;
      BranchEval cand_ev = branch_eval(g, cand, cfg);
      if (cand_ev.feasible) {
        Vector cand_pi = probabilities_from(cand_ev, weights);
        Vector cand_res = g.transpose() * cand_pi;
        const double cand_norm = cand_res.lpNorm<Eigen::Infinity>();
        if (cand_norm < res_norm * (1.0 - 1e-4 * t) || cand_norm <= inner.tol) {
          lambda = cand;
          ev = std::move(cand_ev);
          pi = std::move(cand_pi);
          residual = std::move(cand_res);
          res_norm = cand_norm;
          accepted = true;
          break;
        }
      }
      t *= inner.backtrack_ratio;
    }

    if (res_norm < result.residual) {
      result.residual = res_norm;
      result.lambda = lambda;
    }
    if (!accepted) {
      result.iterations = iter + 1;
      result.converged = res_norm <= inner.tol;
      return result;  // line search stalled
    }
  }

  result.iterations = inner.max_iters;
  result.converged = res_norm <= inner.tol;
  if (res_norm <= result.residual) {
    result.residual = res_norm;
    result.lambda = lambda;
  }
  return result;
}

Vector contrast_probabilities(const DataMatrix& data, const Vector& beta,
                              const MomentModel& model, const Vector& lambda,
                              const CressieReadConfig& cfg) {
  Matrix g = evaluate_moments(model, data, beta);
  Vector weights = Vector::Constant(data.rows(), 1.0 / data.rows());
  return weighted_contrast_probabilities(g, weights, lambda, cfg);
}

InnerSolveResult solve_lambda(const DataMatrix& data, const Vector& beta,
                              const MomentModel& model,
                              const CressieReadConfig& cfg,
                              const InnerSolverConfig& inner) {
  Matrix g = evaluate_moments(model, data, beta);
  Vector weights = Vector::Constant(data.rows(), 1.0 / data.rows());
  return solve_weighted_lambda(g, weights, cfg, inner);
}

ContrastSolution fit(const DataMatrix& data, const MomentModel& model,
                     const CressieReadConfig& cfg,
                     const InnerSolverConfig& inner,
                     const NelderMeadConfig& nm, const Vector& beta_init) {
  cfg.validate();
  inner.validate();
  if (!model.beta_bounds.contains(beta_init))
    throw Error(ErrorCode::InvalidConfig, "beta_init outside beta_bounds");

  const Vector weights = Vector::Constant(data.rows(), 1.0 / data.rows());

  auto profile = [&](const Vector& beta) -> double {
    if (!model.beta_bounds.contains(beta)) return kInf;
    Matrix g;
    try {
      g = evaluate_moments(model, data, beta);
    } catch (const Error&) {
      return kInf;
    }
    if (!g.allFinite()) return kInf;
    InnerSolveResult inner_res = solve_weighted_lambda(g, weights, cfg, inner);
    if (!inner_res.converged) return kInf;
    Vector pi = weighted_contrast_probabilities(g, weights, inner_res.lambda, cfg);
    return cr_objective(pi, cfg);
  };

  const Vector start = detail::bootstrap_feasible_start(
      profile, beta_init, model.beta_bounds, nm.initial_step);
  if (start.size() == 0)
    throw Error(ErrorCode::NoFeasibleBeta,
                "inner solve failed at every probed beta");
  NelderMeadResult nm_res = nelder_mead_minimize(profile, start, nm);
  if (!std::isfinite(nm_res.value))
    throw Error(ErrorCode::NoFeasibleBeta,
                "inner solve failed at every evaluated beta");

  // Re-run the inner solve at the winning beta to assemble the solution.
  Matrix g = evaluate_moments(model, data, nm_res.x);
  InnerSolveResult inner_res = solve_weighted_lambda(g, weights, cfg, inner);
  ContrastSolution sol;
  sol.beta = nm_res.x;
  sol.lambda = inner_res.lambda;
  sol.pi = weighted_contrast_probabilities(g, weights, inner_res.lambda, cfg);
  sol.discrepancy = cr_objective(sol.pi, cfg);
  sol.residual = inner_res.residual;
  sol.converged = inner_res.converged;
  return sol;
}

}  // namespace crlearn
