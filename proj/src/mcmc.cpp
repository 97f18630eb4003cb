#include "crlearn/mcmc.hpp"

#include <cmath>
#include <limits>

namespace crlearn {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

PriorSpec PriorSpec::flat() { return PriorSpec{}; }

PriorSpec PriorSpec::independent_gaussian(Vector mean, Vector sd) {
  if (mean.size() != sd.size())
    throw Error(ErrorCode::InvalidConfig, "prior mean/sd length mismatch");
  for (Index i = 0; i < sd.size(); ++i)
    if (!(sd[i] > 0.0))
      throw Error(ErrorCode::InvalidConfig, "prior sd must be positive");
  PriorSpec p;
  p.kind = PriorKind::IndependentGaussian;
  p.mean = std::move(mean);
  p.sd = std::move(sd);
  return p;
}

PriorSpec PriorSpec::uniform(Box box) {
  PriorSpec p;
  p.kind = PriorKind::Uniform;
  p.box = std::move(box);
  return p;
}

double PriorSpec::log_density(const Vector& theta) const {
  switch (kind) {
    case PriorKind::Flat:
      return 0.0;
    case PriorKind::Uniform:
      return box.contains(theta) ? 0.0 : kNegInf;
    case PriorKind::IndependentGaussian: {
      if (theta.size() != mean.size())
        throw Error(ErrorCode::LengthMismatch, "theta/prior dimension mismatch");
      double acc = 0.0;
      for (Index i = 0; i < theta.size(); ++i) {
        const double z = (theta[i] - mean[i]) / sd[i];
        acc += -0.5 * z * z - std::log(sd[i]) - 0.5 * std::log(2.0 * M_PI);
      }
      return acc;
    }
  }
  return kNegInf;
}

void McmcConfig::validate(Index d_theta) const {
  if (n_iters < 1) throw Error(ErrorCode::InvalidConfig, "n_iters < 1");
  if (burn_in < 0 || burn_in >= n_iters)
    throw Error(ErrorCode::InvalidConfig, "burn_in must lie in [0, n_iters)");
  if (proposal_sd.size() != d_theta)
    throw Error(ErrorCode::InvalidConfig, "proposal_sd length mismatch");
  for (Index i = 0; i < proposal_sd.size(); ++i)
    if (!(proposal_sd[i] > 0.0))
      throw Error(ErrorCode::InvalidConfig, "proposal_sd must be positive");
  if (eps_tol && !(*eps_tol > 0.0))
    throw Error(ErrorCode::InvalidConfig, "eps_tol must be positive");
}

ThetaPoint propose(const ThetaPoint& theta_prev, const McmcConfig& cfg,
                   RngEngine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ThetaPoint prop = theta_prev;
  for (Index i = 0; i < prop.theta.size(); ++i)
    prop.theta[i] += cfg.proposal_sd[i] * normal(rng);
  return prop;
}

double accept_prob(double l_prop, double l_prev, double logprior_prop,
                   double logprior_prev, const McmcConfig& cfg) {
  if (std::isnan(l_prop) || std::isnan(l_prev)) return 0.0;
  double delta;
  if (cfg.paper_faithful_acceptance) {
    delta = l_prop - l_prev;
  } else {
    if (logprior_prop == kNegInf) return 0.0;
    if (logprior_prev == kNegInf) return 1.0;
    delta = (l_prop + logprior_prop) - (l_prev + logprior_prev);
  }
  if (std::isnan(delta)) return 0.0;
  return delta >= 0.0 ? 1.0 : std::exp(delta);
}

Chain run_chain(const LogLikFn& ell, const PriorSpec& prior,
                const ThetaPoint& theta0, const McmcConfig& cfg) {
  const Index d = theta0.theta.size();
  cfg.validate(d);
  if (!theta0.within_bounds())
    throw Error(ErrorCode::InitialPointInfeasible, "theta0 outside bounds");
  double logprior_prev = prior.log_density(theta0.theta);
  if (logprior_prev == kNegInf)
    throw Error(ErrorCode::InitialPointInfeasible, "theta0 outside prior support");

  LearnedStatistic stat0;
  try {
    stat0 = ell(theta0.theta, 0);
  } catch (const Error& e) {
    throw Error(ErrorCode::InitialPointInfeasible,
                std::string("likelihood proxy failed at theta0: ") + e.what());
  }
  if (std::isnan(stat0.value))
    throw Error(ErrorCode::InitialPointInfeasible,
                "likelihood proxy is NaN at theta0");

  Chain chain;
  chain.seed = cfg.seed;
  chain.theta0 = theta0.theta;
  chain.loglik0 = stat0.value;
  chain.samples.resize(cfg.n_iters, d);
  chain.loglik.resize(cfg.n_iters);
  chain.accepted.assign(static_cast<std::size_t>(cfg.n_iters), 0);

  RngEngine rng = make_engine(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  ThetaPoint current = theta0;
  double l_prev = stat0.value;
  Index accept_count = 0;

  for (int k = 1; k <= cfg.n_iters; ++k) {
    ThetaPoint prop = propose(current, cfg, rng);
    bool accepted = false;

    if (prop.within_bounds()) {
      const double logprior_prop = prior.log_density(prop.theta);
      if (logprior_prop != kNegInf) {
        bool eval_ok = true;
        LearnedStatistic stat;
        try {
          stat = ell(prop.theta, static_cast<std::uint64_t>(k));
        } catch (const Error&) {
          eval_ok = false;  // infeasible proposal; zero acceptance
        }
        if (eval_ok) {
          const double alpha =
              accept_prob(stat.value, l_prev, logprior_prop, logprior_prev, cfg);
          if (unif(rng) < alpha) {
            current = prop;
            l_prev = stat.value;
            logprior_prev = logprior_prop;
            accepted = true;
          }
        }
      }
    }

    const Index row = k - 1;
    chain.samples.row(row) = current.theta.transpose();
    chain.loglik[row] = l_prev;
    chain.accepted[static_cast<std::size_t>(row)] = accepted ? 1 : 0;
    if (accepted) ++accept_count;

    if (cfg.eps_tol && !chain.eps_first_hit) {
      const double prev_l = row == 0 ? chain.loglik0 : chain.loglik[row - 1];
      if (std::abs(chain.loglik[row] - prev_l) <= *cfg.eps_tol)
        chain.eps_first_hit = static_cast<Index>(k);
    }
  }

  chain.acceptance_rate =
      static_cast<double>(accept_count) / static_cast<double>(cfg.n_iters);
  return chain;
}

Vector Chain::posterior_mean(int burn_in) const {
  const Index start = std::min<Index>(burn_in, samples.rows());
  const Index count = samples.rows() - start;
  if (count < 1)
    throw Error(ErrorCode::InvalidConfig, "burn-in leaves no samples");
  return samples.bottomRows(count).colwise().mean().transpose();
}

Vector Chain::posterior_sd(int burn_in) const {
  const Index start = std::min<Index>(burn_in, samples.rows());
  const Index count = samples.rows() - start;
  if (count < 2)
    throw Error(ErrorCode::InvalidConfig, "burn-in leaves too few samples");
  const Matrix tail = samples.bottomRows(count);
  const Vector mean = tail.colwise().mean().transpose();
  Vector sd(tail.cols());
  for (Index j = 0; j < tail.cols(); ++j)
    sd[j] = std::sqrt((tail.col(j).array() - mean[j]).square().sum() /
                      static_cast<double>(count - 1));
  return sd;
}

}  // namespace crlearn
