#include "crlearn/summary.hpp"

#include <cmath>

namespace crlearn {

void ReplicationConfig::validate() const {
  if (n_reps < 1)
    throw Error(ErrorCode::EmptyReplications, "n_reps must be at least 1");
}

namespace {

void require_converged(const ContrastSolution& sol, const char* which) {
  if (!sol.converged)
    throw Error(ErrorCode::DomainError,
                std::string(which) + " contrast solution did not converge");
}

double checked_log(double p, const char* which) {
  if (!(p > 0.0))
    throw Error(ErrorCode::DomainError,
                std::string(which) + " has a nonpositive probability");
  return std::log(p);
}

LearnedStatistic assemble(double log_ratio, const Vector& beta_sim,
                          const Vector& beta_obs, SummaryVariant variant) {
  if (beta_sim.size() != beta_obs.size())
    throw Error(ErrorCode::LengthMismatch, "beta dimensions differ");
  LearnedStatistic stat;
  stat.variant = variant;
  stat.log_ratio_term = log_ratio;
  stat.distance_term = 0.5 * (beta_sim - beta_obs).squaredNorm();
  stat.value = stat.log_ratio_term - stat.distance_term;
  return stat;
}

}  // namespace

LearnedStatistic learned_basic(const ContrastSolution& obs,
                               const ContrastSolution& sim) {
  require_converged(obs, "observation");
  require_converged(sim, "simulation");
  if (obs.pi.size() != sim.pi.size())
    throw Error(ErrorCode::LengthMismatch,
                "observation and simulation probability lengths differ");
  double log_ratio = 0.0;
  for (Index i = 0; i < obs.pi.size(); ++i)
    log_ratio += checked_log(sim.pi[i], "simulation") -
                 checked_log(obs.pi[i], "observation");
  return assemble(log_ratio, sim.beta, obs.beta, SummaryVariant::Basic);
}

LearnedStatistic learned_multirep(const ContrastSolution& obs,
                                  const std::vector<ContrastSolution>& sims) {
  if (sims.empty())
    throw Error(ErrorCode::EmptyReplications, "no simulation replications");
  require_converged(obs, "observation");
  const Index n = obs.pi.size();
  Vector pi_avg = Vector::Zero(n);
  Vector beta_avg = Vector::Zero(sims.front().beta.size());
  for (const ContrastSolution& sim : sims) {
    require_converged(sim, "simulation");
    if (sim.pi.size() != n)
      throw Error(ErrorCode::LengthMismatch,
                  "replication probability length differs from observation");
    if (sim.beta.size() != beta_avg.size())
      throw Error(ErrorCode::LengthMismatch, "replication beta dimensions differ");
    pi_avg += sim.pi;
    beta_avg += sim.beta;
  }
  const double n_reps = static_cast<double>(sims.size());
  pi_avg /= n_reps;
  beta_avg /= n_reps;
  double log_ratio = 0.0;
  for (Index i = 0; i < n; ++i)
    log_ratio += checked_log(pi_avg[i], "averaged simulation") -
                 checked_log(obs.pi[i], "observation");
  return assemble(log_ratio, beta_avg, obs.beta, SummaryVariant::MultiRep);
}

namespace {

LearnedStatistic conditional_form(const ContrastSolution& obs,
                                  const LocalContrastSolution& local,
                                  SummaryVariant variant) {
  require_converged(obs, "observation");
  if (!local.converged)
    throw Error(ErrorCode::DomainError, "local contrast solution did not converge");
  const Index n = obs.pi.size();
  if (local.pi.rows() != n || local.pi.cols() != n)
    throw Error(ErrorCode::LengthMismatch,
                "local probability matrix is not n x n for the observation count");
  double log_ratio = 0.0;
  for (Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Index j = 0; j < n; ++j)
      row_sum += checked_log(local.pi(i, j), "local");
    log_ratio += row_sum - checked_log(obs.pi[i], "observation");
  }
  return assemble(log_ratio, local.beta, obs.beta, variant);
}

}  // namespace

LearnedStatistic learned_conditional(const ContrastSolution& obs,
                                     const LocalContrastSolution& local) {
  return conditional_form(obs, local, SummaryVariant::Conditional);
}

LearnedStatistic learned_subset(const ContrastSolution& obs,
                                const LocalContrastSolution& local,
                                const SubsetMask& mask) {
  if (mask.size() != obs.pi.size())
    throw Error(ErrorCode::LengthMismatch, "mask length does not match data");
  if (mask.count() == 0)
    throw Error(ErrorCode::EmptyMask, "subset mask selects no observation");
  return conditional_form(obs, local, SummaryVariant::Subset);
}

LearnedStatistic learned_blockwise(const ContrastSolution& obs_blocks,
                                   const ContrastSolution& sim_blocks) {
  LearnedStatistic stat = learned_basic(obs_blocks, sim_blocks);
  stat.variant = SummaryVariant::Blockwise;
  return stat;
}

}  // namespace crlearn
