#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "crlearn/rng.hpp"
#include "crlearn/types.hpp"

namespace crlearn {

enum class PriorKind { Flat, IndependentGaussian, Uniform };

struct PriorSpec {
  PriorKind kind = PriorKind::Flat;
  Vector mean;  // IndependentGaussian
  Vector sd;    // IndependentGaussian
  Box box;      // Uniform

  double log_density(const Vector& theta) const;

  static PriorSpec flat();
  static PriorSpec independent_gaussian(Vector mean, Vector sd);
  static PriorSpec uniform(Box box);
};

struct McmcConfig {
  int n_iters = 1000;
  Vector proposal_sd;
  std::uint64_t seed = 0;
  int burn_in = 0;
  std::optional<double> eps_tol;
  // Acceptance exactly min{1, exp(l_prop - l_prev)}, without prior terms.
  bool paper_faithful_acceptance = false;

  void validate(Index d_theta) const;
};

struct Chain {
  Matrix samples;  // row k-1 = theta^(k), k = 1..n_iters
  Vector loglik;
  std::vector<std::uint8_t> accepted;
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;
  // First step where |l^(k) - l^(k-1)| fell below eps_tol; diagnostic only,
  // the chain always runs to n_iters.
  std::optional<Index> eps_first_hit;
  Vector theta0;
  double loglik0 = 0.0;

  Vector posterior_mean(int burn_in) const;
  Vector posterior_sd(int burn_in) const;
};

/// Gaussian random-walk step with componentwise scale proposal_sd. Proposals
/// that leave the bounds are returned as-is; the acceptance step rejects them
/// (equivalent to a -inf prior), keeping the kernel symmetric.
ThetaPoint propose(const ThetaPoint& theta_prev, const McmcConfig& cfg,
                   RngEngine& rng);

/// Metropolis acceptance probability. The default mode targets
/// exp(l) * prior; -inf prior yields 0.
double accept_prob(double l_prop, double l_prev, double logprior_prop,
                   double logprior_prev, const McmcConfig& cfg);

/// Log-likelihood proxy callback. The iteration index is supplied so
/// implementations that redraw simulations per proposal can derive their
/// seeds deterministically from (chain seed, iteration).
using LogLikFn =
    std::function<LearnedStatistic(const Vector& theta, std::uint64_t iteration)>;

/// Random-walk Metropolis loop, deterministic given cfg.seed. Proposals where
/// `ell` throws a crlearn::Error are treated as zero-probability states and
/// rejected. Throws InitialPointInfeasible if theta0 is out of bounds, out of
/// prior support, or `ell` fails there.
Chain run_chain(const LogLikFn& ell, const PriorSpec& prior,
                const ThetaPoint& theta0, const McmcConfig& cfg);

}  // namespace crlearn
