#include "crlearn/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "crlearn/rng.hpp"
#include "parallel_for.hpp"

namespace crlearn {

// Implemented in external_process.cpp.
DataMatrix simulate_external(const SimulatorSpec& spec, const Vector& theta,
                             Index n, std::uint64_t seed);

Index SimulatorSpec::theta_dim() const {
  switch (kind) {
    case SimulatorKind::GaussianLocationScale: return 2;
    case SimulatorKind::AR1: return 2;
    case SimulatorKind::LinearModel: return design.cols();
    case SimulatorKind::External: return -1;  // unconstrained
  }
  return -1;
}

namespace {

void check_theta_dim(const SimulatorSpec& spec, const Vector& theta) {
  const Index want = spec.theta_dim();
  if (want >= 0 && theta.size() != want)
    throw Error(ErrorCode::BadTheta,
                "theta has length " + std::to_string(theta.size()) +
                    ", simulator expects " + std::to_string(want));
}

DataMatrix simulate_gaussian(const Vector& theta, Index n, std::uint64_t seed) {
  const double mu = theta[0];
  const double sigma = theta[1];
  if (!(sigma > 0.0))
    throw Error(ErrorCode::BadTheta, "scale parameter must be positive");
  RngEngine rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix y(n, 1);
  for (Index i = 0; i < n; ++i) y(i, 0) = mu + sigma * normal(rng);
  return DataMatrix(std::move(y));
}

DataMatrix simulate_ar1(const Vector& theta, Index n, std::uint64_t seed) {
  const double mu = theta[0];
  const double rho = theta[1];
  if (!(std::abs(rho) < 1.0))
    throw Error(ErrorCode::BadTheta, "AR(1) coefficient must satisfy |rho| < 1");
  RngEngine rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix y(n, 1);
  // Stationary start: innovation variance 1, so var(y) = 1/(1 - rho^2).
  double prev = mu + normal(rng) / std::sqrt(1.0 - rho * rho);
  y(0, 0) = prev;
  for (Index i = 1; i < n; ++i) {
    prev = mu + rho * (prev - mu) + normal(rng);
    y(i, 0) = prev;
  }
  return DataMatrix(std::move(y));
}

DataMatrix simulate_linear(const SimulatorSpec& spec, const Vector& theta,
                           Index n, std::uint64_t seed) {
  if (spec.design.rows() < n)
    throw Error(ErrorCode::BadTheta,
                "design has fewer rows than requested draws");
  RngEngine rng = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index p = spec.design.cols();
  Matrix out(n, p + 1);  // row = (x_i, y_i)
  for (Index i = 0; i < n; ++i) {
    out.block(i, 0, 1, p) = spec.design.row(i);
    out(i, p) = spec.design.row(i).dot(theta) + normal(rng);
  }
  return DataMatrix(std::move(out));
}

}  // namespace

DataMatrix simulate(const SimulatorSpec& spec, const Vector& theta, Index n,
                    std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "need at least one draw");
  check_theta_dim(spec, theta);
  switch (spec.kind) {
    case SimulatorKind::GaussianLocationScale:
      return simulate_gaussian(theta, n, seed);
    case SimulatorKind::AR1:
      return simulate_ar1(theta, n, seed);
    case SimulatorKind::LinearModel:
      return simulate_linear(spec, theta, n, seed);
    case SimulatorKind::External:
      return simulate_external(spec, theta, n, seed);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown simulator kind");
}

std::vector<DataMatrix> run_replications(const SimulatorSpec& spec,
                                         const Vector& theta, Index n,
                                         const ReplicationConfig& rcfg) {
  rcfg.validate();
  std::vector<std::optional<DataMatrix>> slots(rcfg.n_reps);
  std::vector<std::pair<std::size_t, std::string>> failures;
  std::mutex failures_mutex;
  detail::parallel_for(static_cast<std::size_t>(rcfg.n_reps), rcfg.parallel,
                       [&](std::size_t r) {
    try {
      slots[r] = simulate(spec, theta, n,
                          derive_seed(rcfg.base_seed, static_cast<std::uint64_t>(r)));
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      failures.emplace_back(r, e.what());
    }
  });
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    std::string msg = "replication failures:";
    for (const auto& [r, what] : failures)
      msg += " [" + std::to_string(r) + "] " + what + ";";
    throw Error(ErrorCode::ExternalFailure, msg);
  }
  std::vector<DataMatrix> out;
  out.reserve(slots.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace crlearn
