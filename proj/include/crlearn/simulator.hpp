#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crlearn/summary.hpp"
#include "crlearn/types.hpp"

namespace crlearn {

enum class SimulatorKind { GaussianLocationScale, LinearModel, AR1, External };

/// Forward-model description. Built-in kinds draw with an explicit seed;
/// External delegates to a child process speaking the line protocol
/// (one JSON request per line on stdin, one JSON reply per line on stdout,
/// empty line ends the session).
struct SimulatorSpec {
  SimulatorKind kind = SimulatorKind::GaussianLocationScale;
  Matrix design;  // LinearModel regressor rows; theta dimension = columns
  std::string command;
  std::vector<std::string> args;
  double timeout_sec = 30.0;

  Index theta_dim() const;
};

/// Draw n rows from the forward model. Deterministic in (spec, theta, n, seed).
DataMatrix simulate(const SimulatorSpec& spec, const Vector& theta, Index n,
                    std::uint64_t seed);

/// Independent replications with seeds derived from rcfg.base_seed; the
/// result is ordered by replication index regardless of scheduling.
std::vector<DataMatrix> run_replications(const SimulatorSpec& spec,
                                         const Vector& theta, Index n,
                                         const ReplicationConfig& rcfg);

}  // namespace crlearn
