#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_helpers.hpp"

using namespace crlearn;
using namespace crlearn::testing;

TEST_CASE("cr_objective vanishes on the uniform vector") {
  for (Index n : {1, 2, 3, 7, 50}) {
    const Vector uniform = Vector::Constant(n, 1.0 / n);
    for (double gamma : {-2.0, -0.5, 0.5, 1.0, 2.0})
      CHECK(cr_objective(uniform, gamma) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cr_objective(uniform, CressieReadConfig::el()) ==
          doctest::Approx(0.0).epsilon(1e-14));
    CHECK(cr_objective(uniform, CressieReadConfig::et()) ==
          doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("cr_objective worked example at gamma = 1") {
  Vector pi(3);
  pi << 0.5, 0.5, 0.0;
  CHECK(cr_objective(pi, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("cr_objective single-point simplex") {
  CHECK(cr_objective(Vector::Constant(1, 1.0), 2.0) == 0.0);
}

TEST_CASE("cr_objective rejects gamma poles and off-simplex input") {
  const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
  CHECK_THROWS_AS(cr_objective(uniform, 0.0), Error);
  CHECK_THROWS_AS(cr_objective(uniform, -1.0), Error);
  Vector bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(cr_objective(bad, 1.0), Error);
  bad << -0.2, 1.2;
  CHECK_THROWS_AS(cr_objective(bad, 1.0), Error);
}

TEST_CASE("cr_objective is nonnegative on random simplex points") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<Index> size(2, 12);
  const double gammas[] = {-2.0, -0.5, 0.5, 1.0, 2.0};
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector pi = random_simplex(size(rng), rng);
    for (double gamma : gammas) CHECK(cr_objective(pi, gamma) >= -1e-12);
    CHECK(cr_objective(pi, CressieReadConfig::el()) >= -1e-12);
    CHECK(cr_objective(pi, CressieReadConfig::et()) >= -1e-12);
  }
}

TEST_CASE("cr_objective is permutation invariant") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Vector pi = random_simplex(6, rng);
    Vector shuffled = pi;
    std::shuffle(shuffled.data(), shuffled.data() + shuffled.size(), rng);
    for (double gamma : {-0.5, 1.0, 2.0})
      CHECK(cr_objective(pi, gamma) ==
            doctest::Approx(cr_objective(shuffled, gamma)).epsilon(1e-12));
  }
}

TEST_CASE("CressieReadConfig validation") {
  CHECK_THROWS_AS(CressieReadConfig::general(0.0), Error);
  CHECK_THROWS_AS(CressieReadConfig::general(-1.0), Error);
  CHECK_NOTHROW(CressieReadConfig::general(-0.5));
  CHECK(CressieReadConfig::el().limit_branch == LimitBranch::EL_gamma0);
  CHECK(CressieReadConfig::et().limit_branch == LimitBranch::ET_gammaNeg1);
}

TEST_CASE("DataMatrix validates shape and finiteness") {
  CHECK_THROWS_AS(DataMatrix{Matrix(0, 1)}, Error);
  Matrix bad(1, 1);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DataMatrix{bad}, Error);
  Matrix good(2, 2);
  good << 1, 2, 3, 4;
  const DataMatrix data(good);
  CHECK(data.rows() == 2);
  CHECK(data.cols() == 2);
  CHECK(data.row(1)[0] == 3.0);
}

TEST_CASE("Box membership") {
  const Box box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  Vector inside(2), outside(2);
  inside << 0.0, 1.0;
  outside << 0.0, 1.5;
  CHECK(box.contains(inside));
  CHECK_FALSE(box.contains(outside));
  CHECK(Box::unbounded(3).contains(Vector::Constant(3, 1e100)));
}

TEST_CASE("evaluate_moments batch path matches per-row path") {
  std::mt19937_64 rng(3);
  const DataMatrix data = random_column_data(9, rng);
  MomentModel model = mean_variance_model();
  Vector beta(2);
  beta << 0.3, 1.2;
  const Matrix batched = evaluate_moments(model, data, beta);
  MomentModel rowwise = model;
  rowwise.eval_all = nullptr;
  const Matrix looped = evaluate_moments(rowwise, data, beta);
  CHECK((batched - looped).cwiseAbs().maxCoeff() == 0.0);
}
