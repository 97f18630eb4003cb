#include <doctest.h>

#include <cmath>

#include "crlearn/simulator.hpp"
#include "test_helpers.hpp"

using namespace crlearn;
using namespace crlearn::testing;

namespace {

Vector theta2(double a, double b) {
  Vector t(2);
  t << a, b;
  return t;
}

SimulatorSpec gaussian_spec() {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::GaussianLocationScale;
  return spec;
}

SimulatorSpec extsim_spec(const std::string& args_kind = "") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::External;
  spec.command = CRLEARN_EXTSIM_PATH;
  if (!args_kind.empty()) spec.args = {"--kind", args_kind};
  spec.timeout_sec = 20.0;
  return spec;
}

}  // namespace

TEST_CASE("gaussian draws concentrate on the requested moments") {
  const DataMatrix y = simulate(gaussian_spec(), theta2(0.0, 1.0), 10000, 123);
  const double mean = y.values().col(0).mean();
  const double sd = std::sqrt((y.values().col(0).array() - mean).square().sum() /
                              (y.rows() - 1));
  CHECK(std::abs(mean) < 0.05);
  CHECK(std::abs(sd - 1.0) < 0.05);
}

TEST_CASE("gaussian rejects a nonpositive scale") {
  CHECK_THROWS_AS(simulate(gaussian_spec(), theta2(0.0, 0.0), 10, 1), Error);
  CHECK_THROWS_AS(simulate(gaussian_spec(), theta2(0.0, -1.0), 10, 1), Error);
}

TEST_CASE("ar1 with zero autocorrelation is i.i.d. around the location") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::AR1;
  const DataMatrix y = simulate(spec, theta2(2.0, 0.0), 10000, 321);
  const auto col = y.values().col(0);
  const double mean = col.mean();
  CHECK(std::abs(mean - 2.0) < 0.05);
  double num = 0.0, den = 0.0;
  for (Index i = 1; i < y.rows(); ++i)
    num += (col[i] - mean) * (col[i - 1] - mean);
  for (Index i = 0; i < y.rows(); ++i) den += (col[i] - mean) * (col[i] - mean);
  CHECK(std::abs(num / den) < 0.05);
  CHECK_THROWS_AS(simulate(spec, theta2(0.0, 1.0), 10, 1), Error);
}

TEST_CASE("ar1 stationary variance") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::AR1;
  const double rho = 0.8;
  const DataMatrix y = simulate(spec, theta2(0.0, rho), 20000, 11);
  const auto col = y.values().col(0);
  const double var = (col.array() - col.mean()).square().mean();
  CHECK(var == doctest::Approx(1.0 / (1.0 - rho * rho)).epsilon(0.1));
}

TEST_CASE("simulation is deterministic in the seed") {
  const DataMatrix a = simulate(gaussian_spec(), theta2(1.0, 2.0), 50, 777);
  const DataMatrix b = simulate(gaussian_spec(), theta2(1.0, 2.0), 50, 777);
  const DataMatrix c = simulate(gaussian_spec(), theta2(1.0, 2.0), 50, 778);
  CHECK((a.values() - b.values()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.values() - c.values()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("linear model emits regressors with the response") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::LinearModel;
  spec.design = Matrix(4, 2);
  spec.design << 1, 0, 1, 1, 1, 2, 1, 3;
  const DataMatrix y = simulate(spec, theta2(0.5, 2.0), 4, 9);
  CHECK(y.cols() == 3);
  CHECK((y.values().leftCols(2) - spec.design).cwiseAbs().maxCoeff() == 0.0);
  // Response = x.theta + standard normal noise; crude 5-sigma sanity band.
  for (Index i = 0; i < 4; ++i) {
    const double expected = spec.design.row(i).dot(theta2(0.5, 2.0));
    CHECK(std::abs(y.values()(i, 2) - expected) < 5.0);
  }
  CHECK_THROWS_AS(simulate(spec, theta2(0.5, 2.0), 9, 1), Error);
}

TEST_CASE("replications derive distinct ordered seeds") {
  ReplicationConfig rcfg;
  rcfg.n_reps = 4;
  rcfg.base_seed = 55;
  const auto reps = run_replications(gaussian_spec(), theta2(0.0, 1.0), 20, rcfg);
  REQUIRE(reps.size() == 4);
  // Replication r uses derive_seed(base, r).
  for (std::size_t r = 0; r < 4; ++r) {
    const DataMatrix direct = simulate(gaussian_spec(), theta2(0.0, 1.0), 20,
                                       derive_seed(55, r));
    CHECK((reps[r].values() - direct.values()).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((reps[0].values() - reps[1].values()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("parallel replications equal the serial ones") {
  ReplicationConfig serial;
  serial.n_reps = 6;
  serial.base_seed = 1234;
  ReplicationConfig parallel = serial;
  parallel.parallel = true;
  const auto a = run_replications(gaussian_spec(), theta2(0.5, 1.5), 30, serial);
  const auto b = run_replications(gaussian_spec(), theta2(0.5, 1.5), 30, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    CHECK((a[r].values() - b[r].values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("external simulator reproduces the built-in generator") {
  const DataMatrix via_child = simulate(extsim_spec(), theta2(1.0, 2.0), 25, 99);
  const DataMatrix direct = simulate(gaussian_spec(), theta2(1.0, 2.0), 25, 99);
  CHECK((via_child.values() - direct.values()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("external simulator surfaces child-side errors") {
  // sigma <= 0 fails inside the child and comes back as an error reply.
  try {
    simulate(extsim_spec(), theta2(0.0, -1.0), 5, 1);
    FAIL("expected ExternalFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExternalFailure);
  }
}

TEST_CASE("malformed replies are ExternalFailure, not data") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::External;
  spec.command = "/bin/sh";
  spec.args = {"-c", "read line; echo 'this is not json'"};
  spec.timeout_sec = 10.0;
  try {
    simulate(spec, theta2(0.0, 1.0), 3, 1);
    FAIL("expected ExternalFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExternalFailure);
  }
}

TEST_CASE("a child that exits without replying is an ExternalFailure") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::External;
  spec.command = "/bin/sh";
  spec.args = {"-c", "exit 3"};
  spec.timeout_sec = 10.0;
  CHECK_THROWS_AS(simulate(spec, theta2(0.0, 1.0), 3, 1), Error);
}

TEST_CASE("timeouts kill the child and fail cleanly") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::External;
  spec.command = "/bin/sh";
  spec.args = {"-c", "sleep 30"};
  spec.timeout_sec = 0.3;
  try {
    simulate(spec, theta2(0.0, 1.0), 3, 1);
    FAIL("expected timeout");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ExternalFailure);
  }
}

TEST_CASE("replication failures are aggregated with their indices") {
  SimulatorSpec spec;
  spec.kind = SimulatorKind::External;
  spec.command = "/bin/false";
  spec.timeout_sec = 5.0;
  ReplicationConfig rcfg;
  rcfg.n_reps = 3;
  rcfg.base_seed = 1;
  try {
    run_replications(spec, theta2(0.0, 1.0), 4, rcfg);
    FAIL("expected aggregated failure");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("[0]") != std::string::npos);
    CHECK(what.find("[2]") != std::string::npos);
  }
}

TEST_CASE("seed derivation separates nearby bases and indices") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(0, 5) != derive_seed(5, 0));
}
