#pragma once

#include <memory>

#include "crlearn/config.hpp"

namespace crlearn {

/// Instantiate one of the named built-in moment restrictions for data of
/// width d_y:
///   Mean         g(y, b) = y - b
///   MeanVariance g(y, b) = (y - b1, (y - b1)^2 - b2)        (d_y = 1)
///   LinearScore  g((x, y), b) = x (y - x.b)                  (row = x, y)
MomentModel make_moment_model(const MomentModelSpec& spec, Index d_y);

/// Method-of-moments seed for a built-in model, clamped into the bounds;
/// midpoint of the bounds when no seed is available.
Vector default_beta_init(const MomentModelSpec& spec, const MomentModel& model,
                         const DataMatrix& data);

/// Observation-side state assembled once per run: the data, the moment
/// model, the observation-side contrast solution for the configured variant,
/// and (for the conditional variants) kernel weights and mask. `evaluate` is
/// the learned log-likelihood proxy handed to the MCMC loop; the iteration
/// index seeds the per-proposal simulations.
class Pipeline {
 public:
  static std::shared_ptr<Pipeline> build(const RunConfig& cfg);

  LearnedStatistic evaluate(const Vector& theta, std::uint64_t iteration) const;

  const RunConfig& config() const { return cfg_; }
  const DataMatrix& observations() const { return obs_; }
  const MomentModel& model() const { return model_; }
  const ContrastSolution& observation_solution() const { return obs_solution_; }

 private:
  Pipeline(RunConfig cfg, DataMatrix obs);

  RunConfig cfg_;
  DataMatrix obs_;
  MomentModel model_;
  ContrastSolution obs_solution_;
  std::optional<KernelWeightMatrix> weights_;
  std::optional<SubsetMask> mask_;
  std::uint64_t sim_stream_ = 0;
};

/// Executes the configured mode and writes its artifacts (plus the resolved
/// config) into cfg.output_dir. Returns the process exit code.
int run(const RunConfig& cfg);

}  // namespace crlearn
