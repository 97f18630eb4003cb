#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "crlearn/blockwise.hpp"
#include "crlearn/cr_solver.hpp"
#include "crlearn/local_conditional.hpp"
#include "crlearn/mcmc.hpp"
#include "crlearn/simulator.hpp"
#include "crlearn/summary.hpp"

namespace crlearn {

enum class RunMode { Fit, Summarize, Mcmc, Simulate };

const char* run_mode_name(RunMode mode);
RunMode parse_run_mode(const std::string& name);

/// Named built-in moment restriction plus an optional bounds override.
struct MomentModelSpec {
  std::string name = "Mean";  // Mean | MeanVariance | LinearScore
  std::optional<Box> beta_bounds;
};

/// Fully-resolved run description; mirrors the JSON config document
/// field-for-field so a resolved config reproduces the run.
struct RunConfig {
  RunMode mode = RunMode::Fit;
  std::string data_path;
  std::string output_dir = ".";
  std::uint64_t seed = 0;

  SimulatorSpec simulator;
  MomentModelSpec moment_model;
  CressieReadConfig cr;
  InnerSolverConfig inner;
  NelderMeadConfig nelder_mead;

  SummaryVariant variant = SummaryVariant::Basic;
  ReplicationConfig replications;
  KernelConfig kernel;
  std::optional<std::vector<Index>> subset_indices;
  BlockConfig blocks;

  McmcConfig mcmc;
  bool resimulate_per_proposal = true;
  PriorSpec prior;

  std::optional<Vector> theta;  // mcmc start / summarize evaluation point
  std::optional<Box> theta_bounds;
  Index sim_n = 0;  // draws per simulation; 0 means "match the observations"
  std::optional<Vector> beta_init;
};

RunConfig run_config_from_json(const nlohmann::json& doc);
nlohmann::json run_config_to_json(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);

}  // namespace crlearn
