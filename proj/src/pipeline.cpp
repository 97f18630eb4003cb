#include "crlearn/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "crlearn/csv.hpp"

namespace crlearn {

namespace {

using json = nlohmann::json;

// Stream tag separating simulation seeds from every other use of the seed.
constexpr std::uint64_t kSimStream = 0x53494D55ULL;

Box default_bounds(Index d) {
  return Box(Vector::Constant(d, -1e6), Vector::Constant(d, 1e6));
}

Vector clamp_into(const Box& box, Vector x) {
  for (Index i = 0; i < x.size(); ++i)
    x[i] = std::min(std::max(x[i], box.lo[i]), box.hi[i]);
  return x;
}

}  // namespace

MomentModel make_moment_model(const MomentModelSpec& spec, Index d_y) {
  MomentModel model;
  model.d_y = d_y;
  if (spec.name == "Mean") {
    model.d_beta = d_y;
    model.d_g = d_y;
    model.eval = [](const Vector& y, const Vector& beta) -> Vector {
      return y - beta;
    };
    model.eval_all = [](const DataMatrix& data, const Vector& beta) -> Matrix {
      return data.values().rowwise() - beta.transpose();
    };
    model.beta_bounds = default_bounds(d_y);
  } else if (spec.name == "MeanVariance") {
    if (d_y != 1)
      throw Error(ErrorCode::InvalidConfig,
                  "MeanVariance expects one data column");
    model.d_beta = 2;
    model.d_g = 2;
    model.eval = [](const Vector& y, const Vector& beta) -> Vector {
      const double centered = y[0] - beta[0];
      Vector g(2);
      g << centered, centered * centered - beta[1];
      return g;
    };
    model.eval_all = [](const DataMatrix& data, const Vector& beta) -> Matrix {
      Matrix g(data.rows(), 2);
      g.col(0) = data.values().col(0).array() - beta[0];
      g.col(1) = g.col(0).array().square() - beta[1];
      return g;
    };
    Vector lo(2), hi(2);
    lo << -1e6, 1e-8;
    hi << 1e6, 1e12;
    model.beta_bounds = Box(lo, hi);
  } else if (spec.name == "LinearScore") {
    if (d_y < 2)
      throw Error(ErrorCode::InvalidConfig,
                  "LinearScore expects regressor columns plus a response");
    const Index p = d_y - 1;
    model.d_beta = p;
    model.d_g = p;
    model.eval = [p](const Vector& row, const Vector& beta) -> Vector {
      const Vector x = row.head(p);
      return x * (row[p] - x.dot(beta));
    };
    model.eval_all = [p](const DataMatrix& data, const Vector& beta) -> Matrix {
      const auto x = data.values().leftCols(p);
      const Vector resid = data.values().col(p) - x * beta;
      return x.array().colwise() * resid.array();
    };
    model.beta_bounds = default_bounds(p);
  } else {
    throw Error(ErrorCode::InvalidConfig,
                "unknown moment model '" + spec.name + "'");
  }
  if (spec.beta_bounds) {
    if (spec.beta_bounds->dim() != model.d_beta)
      throw Error(ErrorCode::InvalidConfig, "beta_bounds dimension mismatch");
    model.beta_bounds = *spec.beta_bounds;
  }
  return model;
}

Vector default_beta_init(const MomentModelSpec& spec, const MomentModel& model,
                         const DataMatrix& data) {
  if (spec.name == "Mean")
    return clamp_into(model.beta_bounds,
                      data.values().colwise().mean().transpose());
  if (spec.name == "MeanVariance") {
    const double mean = data.values().col(0).mean();
    const double var = (data.values().col(0).array() - mean).square().mean();
    Vector seed(2);
    seed << mean, var;
    return clamp_into(model.beta_bounds, seed);
  }
  if (spec.name == "LinearScore") {
    const Index p = model.d_beta;
    const auto x = data.values().leftCols(p);
    const Vector y = data.values().col(p);
    Vector ols = (x.transpose() * x)
                     .colPivHouseholderQr()
                     .solve(x.transpose() * y);
    if (!ols.allFinite()) ols = model.beta_bounds.midpoint();
    return clamp_into(model.beta_bounds, ols);
  }
  return model.beta_bounds.midpoint();
}

Pipeline::Pipeline(RunConfig cfg, DataMatrix obs)
    : cfg_(std::move(cfg)), obs_(std::move(obs)) {}

std::shared_ptr<Pipeline> Pipeline::build(const RunConfig& cfg) {
  if (cfg.data_path.empty())
    throw Error(ErrorCode::InvalidConfig, "no observation data configured");
  DataMatrix obs = load_observations(cfg.data_path);
  auto p = std::shared_ptr<Pipeline>(new Pipeline(cfg, std::move(obs)));

  p->model_ = make_moment_model(cfg.moment_model, p->obs_.cols());
  const Vector obs_init =
      cfg.beta_init ? *cfg.beta_init
                    : default_beta_init(cfg.moment_model, p->model_, p->obs_);

  if (cfg.sim_n > 0 && cfg.sim_n != p->obs_.rows())
    throw Error(ErrorCode::InvalidConfig,
                "sim_n must match the observation count for the learned "
                "statistic variants");

  switch (cfg.variant) {
    case SummaryVariant::Basic:
    case SummaryVariant::MultiRep:
      p->obs_solution_ = fit(p->obs_, p->model_, cfg.cr, cfg.inner,
                             cfg.nelder_mead, obs_init);
      break;
    case SummaryVariant::Conditional:
    case SummaryVariant::Subset: {
      p->obs_solution_ = fit(p->obs_, p->model_, cfg.cr, cfg.inner,
                             cfg.nelder_mead, obs_init);
      p->weights_ = kernel_weights(p->obs_, cfg.kernel);
      if (cfg.variant == SummaryVariant::Subset) {
        if (!cfg.subset_indices)
          throw Error(ErrorCode::InvalidConfig,
                      "subset variant requires subset.indices");
        SubsetMask mask{std::vector<bool>(
            static_cast<std::size_t>(p->obs_.rows()), false)};
        for (Index idx : *cfg.subset_indices) {
          if (idx < 0 || idx >= p->obs_.rows())
            throw Error(ErrorCode::InvalidConfig,
                        "subset index " + std::to_string(idx) + " out of range");
          mask.selected[static_cast<std::size_t>(idx)] = true;
        }
        if (mask.count() == 0)
          throw Error(ErrorCode::EmptyMask, "subset mask selects no observation");
        p->mask_ = std::move(mask);
      }
      break;
    }
    case SummaryVariant::Blockwise:
      p->obs_solution_ = fit_blocks(p->obs_, p->model_, cfg.cr, cfg.blocks,
                                    cfg.inner, cfg.nelder_mead, obs_init);
      break;
  }
  if (!p->obs_solution_.converged)
    throw Error(ErrorCode::NoConvergence,
                "observation-side contrast fit did not converge");

  p->sim_stream_ = derive_seed(cfg.mcmc.seed, kSimStream);
  return p;
}

LearnedStatistic Pipeline::evaluate(const Vector& theta,
                                    std::uint64_t iteration) const {
  const Index n = obs_.rows();
  const std::uint64_t sim_seed = cfg_.resimulate_per_proposal
                                     ? derive_seed(sim_stream_, iteration)
                                     : sim_stream_;

  auto fit_sim = [&](const DataMatrix& sim) {
    const Vector init = default_beta_init(cfg_.moment_model, model_, sim);
    return fit(sim, model_, cfg_.cr, cfg_.inner, cfg_.nelder_mead, init);
  };

  switch (cfg_.variant) {
    case SummaryVariant::Basic: {
      DataMatrix sim = simulate(cfg_.simulator, theta, n, sim_seed);
      return learned_basic(obs_solution_, fit_sim(sim));
    }
    case SummaryVariant::MultiRep: {
      ReplicationConfig rcfg = cfg_.replications;
      rcfg.base_seed = sim_seed;
      std::vector<DataMatrix> reps = run_replications(cfg_.simulator, theta, n, rcfg);
      std::vector<ContrastSolution> sols;
      sols.reserve(reps.size());
      for (const DataMatrix& rep : reps) sols.push_back(fit_sim(rep));
      return learned_multirep(obs_solution_, sols);
    }
    case SummaryVariant::Conditional:
    case SummaryVariant::Subset: {
      DataMatrix sim = simulate(cfg_.simulator, theta, n, sim_seed);
      const Vector init = default_beta_init(cfg_.moment_model, model_, sim);
      LocalContrastSolution local = fit_local_weighted(
          *weights_, sim, model_, cfg_.cr, mask_, cfg_.inner, cfg_.nelder_mead,
          init);
      if (cfg_.variant == SummaryVariant::Subset)
        return learned_subset(obs_solution_, local, *mask_);
      return learned_conditional(obs_solution_, local);
    }
    case SummaryVariant::Blockwise: {
      DataMatrix sim = simulate(cfg_.simulator, theta, n, sim_seed);
      const Vector init = default_beta_init(cfg_.moment_model, model_, sim);
      ContrastSolution sim_blocks = fit_blocks(sim, model_, cfg_.cr, cfg_.blocks,
                                               cfg_.inner, cfg_.nelder_mead, init);
      return learned_blockwise(obs_solution_, sim_blocks);
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown summary variant");
}

namespace {

json contrast_to_json(const ContrastSolution& sol) {
  json out;
  json pi = json::array();
  for (Index i = 0; i < sol.pi.size(); ++i) pi.push_back(sol.pi[i]);
  json lambda = json::array();
  for (Index i = 0; i < sol.lambda.size(); ++i) lambda.push_back(sol.lambda[i]);
  json beta = json::array();
  for (Index i = 0; i < sol.beta.size(); ++i) beta.push_back(sol.beta[i]);
  out["pi"] = std::move(pi);
  out["lambda"] = std::move(lambda);
  out["beta"] = std::move(beta);
  out["discrepancy"] = sol.discrepancy;
  out["residual"] = sol.residual;
  out["converged"] = sol.converged;
  return out;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out << doc.dump(2) << "\n";
}

void write_resolved_config(const RunConfig& cfg,
                           const std::filesystem::path& dir) {
  write_json_file(dir / "resolved_config.json", run_config_to_json(cfg));
}

std::vector<std::string> theta_header(Index d) {
  std::vector<std::string> names;
  names.reserve(d);
  for (Index j = 0; j < d; ++j)
    names.push_back("theta" + std::to_string(j + 1));
  return names;
}

int run_simulate(const RunConfig& cfg, const std::filesystem::path& dir) {
  if (!cfg.theta)
    throw Error(ErrorCode::InvalidConfig, "simulate mode requires theta");
  if (cfg.sim_n < 1)
    throw Error(ErrorCode::InvalidConfig, "simulate mode requires sim_n >= 1");
  DataMatrix y = simulate(cfg.simulator, *cfg.theta, cfg.sim_n, cfg.seed);
  std::vector<std::string> header;
  for (Index j = 0; j < y.cols(); ++j)
    header.push_back("y" + std::to_string(j + 1));
  write_csv((dir / "data.csv").string(), y.values(), header);
  write_resolved_config(cfg, dir);
  return 0;
}

int run_fit(const RunConfig& cfg, const std::filesystem::path& dir) {
  if (cfg.data_path.empty())
    throw Error(ErrorCode::InvalidConfig, "fit mode requires data");
  DataMatrix obs = load_observations(cfg.data_path);
  MomentModel model = make_moment_model(cfg.moment_model, obs.cols());
  const Vector init = cfg.beta_init
                          ? *cfg.beta_init
                          : default_beta_init(cfg.moment_model, model, obs);
  ContrastSolution sol =
      cfg.variant == SummaryVariant::Blockwise
          ? fit_blocks(obs, model, cfg.cr, cfg.blocks, cfg.inner,
                       cfg.nelder_mead, init)
          : fit(obs, model, cfg.cr, cfg.inner, cfg.nelder_mead, init);
  write_json_file(dir / "contrast.json", contrast_to_json(sol));
  write_resolved_config(cfg, dir);
  return 0;
}

int run_summarize(const RunConfig& cfg, const std::filesystem::path& dir) {
  if (!cfg.theta)
    throw Error(ErrorCode::InvalidConfig, "summarize mode requires theta");
  auto pipeline = Pipeline::build(cfg);
  LearnedStatistic stat = pipeline->evaluate(*cfg.theta, 0);
  json out;
  out["value"] = stat.value;
  out["log_ratio_term"] = stat.log_ratio_term;
  out["distance_term"] = stat.distance_term;
  out["variant"] = summary_variant_name(stat.variant);
  json theta = json::array();
  for (Index i = 0; i < cfg.theta->size(); ++i) theta.push_back((*cfg.theta)[i]);
  out["theta"] = std::move(theta);
  write_json_file(dir / "summary.json", out);
  write_resolved_config(cfg, dir);
  return 0;
}

int run_mcmc(const RunConfig& cfg, const std::filesystem::path& dir) {
  if (!cfg.theta)
    throw Error(ErrorCode::InvalidConfig, "mcmc mode requires theta (start point)");
  if (!cfg.theta_bounds)
    throw Error(ErrorCode::InvalidConfig, "mcmc mode requires theta_bounds");
  auto pipeline = Pipeline::build(cfg);
  ThetaPoint theta0{*cfg.theta, *cfg.theta_bounds};
  LogLikFn ell = [pipeline](const Vector& theta, std::uint64_t iteration) {
    return pipeline->evaluate(theta, iteration);
  };
  Chain chain = run_chain(ell, cfg.prior, theta0, cfg.mcmc);

  write_csv((dir / "samples.csv").string(), chain.samples,
            theta_header(chain.samples.cols()));

  json diag;
  diag["acceptance_rate"] = chain.acceptance_rate;
  diag["n_iters"] = cfg.mcmc.n_iters;
  diag["burn_in"] = cfg.mcmc.burn_in;
  diag["seed"] = chain.seed;
  const Vector mean = chain.posterior_mean(cfg.mcmc.burn_in);
  const Vector sd = chain.posterior_sd(cfg.mcmc.burn_in);
  json mean_json = json::array(), sd_json = json::array();
  for (Index j = 0; j < mean.size(); ++j) {
    mean_json.push_back(mean[j]);
    sd_json.push_back(sd[j]);
  }
  diag["posterior_mean"] = std::move(mean_json);
  diag["posterior_sd"] = std::move(sd_json);
  if (cfg.mcmc.eps_tol) {
    diag["eps_tol"] = *cfg.mcmc.eps_tol;
    if (chain.eps_first_hit)
      diag["eps_first_hit"] = *chain.eps_first_hit;
    else
      diag["eps_first_hit"] = nullptr;
  }
  write_json_file(dir / "diagnostics.json", diag);
  write_resolved_config(cfg, dir);
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw Error(ErrorCode::IoError,
                "cannot create output directory '" + cfg.output_dir + "'");
  switch (cfg.mode) {
    case RunMode::Simulate: return run_simulate(cfg, dir);
    case RunMode::Fit: return run_fit(cfg, dir);
    case RunMode::Summarize: return run_summarize(cfg, dir);
    case RunMode::Mcmc: return run_mcmc(cfg, dir);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown run mode");
}

}  // namespace crlearn
