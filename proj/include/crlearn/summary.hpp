#pragma once

#include <cstdint>
#include <vector>

#include "crlearn/local_conditional.hpp"
#include "crlearn/types.hpp"

namespace crlearn {

struct ReplicationConfig {
  int n_reps = 1;
  std::uint64_t base_seed = 0;
  bool parallel = false;

  void validate() const;
};

/// Basic learned statistic: sum_i (log pi_sim_i - log pi_obs_i)
/// minus half the squared distance between the fitted betas.
LearnedStatistic learned_basic(const ContrastSolution& obs,
                               const ContrastSolution& sim);

/// Replication-averaged variant: probabilities and betas are averaged over
/// the replications before entering the basic form.
LearnedStatistic learned_multirep(const ContrastSolution& obs,
                                  const std::vector<ContrastSolution>& sims);

/// Conditional variant over a local (kernel-weighted) solution:
/// sum_i (sum_j log pi_ij - log pi_obs_i) - distance term.
LearnedStatistic learned_conditional(const ContrastSolution& obs,
                                     const LocalContrastSolution& local);

/// Subset variant: same functional form as the conditional statistic (the
/// outer sum runs over all rows); the mask is the one the local solution was
/// fitted under and is validated here.
LearnedStatistic learned_subset(const ContrastSolution& obs,
                                const LocalContrastSolution& local,
                                const SubsetMask& mask);

/// Block-wise variant on block-level contrast solutions (length n - m + 1).
LearnedStatistic learned_blockwise(const ContrastSolution& obs_blocks,
                                   const ContrastSolution& sim_blocks);

}  // namespace crlearn
