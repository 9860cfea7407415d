#include "doctest.h"

#include <cmath>

#include "hsfuse/errors.hpp"
#include "hsfuse/parallel.hpp"
#include "hsfuse/sylvester.hpp"
#include "support/instances.hpp"

using namespace hsfuse;
using namespace hsfuse::sylvester;
using hsfuse::testing::random_cube;
using hsfuse::testing::random_problem;
using hsfuse::testing::rel_diff;

namespace {

FusionProblem scalar_problem(std::mt19937_64& rng) {
  FusionProblem p;
  p.blur = degradation::BlurSpec::delta();
  p.dec = degradation::Decimation{};
  p.srf = degradation::Srf::identity(1);
  p.lr_hsi = random_cube(1, 4, 5, rng);
  p.hr_msi = random_cube(1, 4, 5, rng);
  p.prior = random_cube(1, 4, 5, rng);
  return p;
}

double objective(const FusionProblem& p, double mu, const HyperCube& x) {
  const auto t = objective_terms(p, x);
  return t.j1 + mu * t.j2;
}

// Problem whose observations are generated noiselessly from `truth`.
FusionProblem consistent_problem(const HyperCube& truth, std::size_t msi_bands, std::size_t s,
                                 std::mt19937_64& rng) {
  FusionProblem p;
  p.blur = testing::random_kernel(3, 3, rng);
  p.dec = degradation::Decimation::uniform(s, s / 2, 0);
  p.srf = testing::random_srf(msi_bands, truth.bands(), rng);
  p.lr_hsi = degradation::blur_decimate(truth, p.blur, p.dec);
  p.hr_msi = degradation::srf_apply(truth, p.srf);
  p.prior = truth;
  return p;
}

}  // namespace

TEST_CASE("scalar examples") {
  std::mt19937_64 rng(1);
  const auto p = scalar_problem(rng);

  const auto x0 = solve_fuse(p, 0.0);
  const auto x2 = solve_fuse(p, 2.0);
  for (std::size_t n = 0; n < x0.size(); ++n) {
    const double y = p.lr_hsi.data()[n];
    const double z = p.hr_msi.data()[n];
    const double xp = p.prior.data()[n];
    CHECK(x0.data()[n] == doctest::Approx((y + z) / 2).epsilon(1e-14));
    CHECK(x2.data()[n] == doctest::Approx((y + z + 2 * xp) / 4).epsilon(1e-14));
  }
}

TEST_CASE("4-band 8x8 instance with uniform 2x2 blur matches the dense oracle") {
  std::mt19937_64 rng(2);
  FusionProblem p;
  p.blur = degradation::BlurSpec::uniform(2);
  p.dec = degradation::Decimation::block_mean(2);
  p.srf = testing::random_srf(2, 4, rng);
  p.prior = random_cube(4, 8, 8, rng);
  p.hr_msi = random_cube(2, 8, 8, rng);
  p.lr_hsi = random_cube(4, 4, 4, rng);
  CHECK(rel_diff(solve_fuse(p, 0.01), solve_fuse_oracle(p, 0.01)) <= 1e-7);
}

TEST_CASE("fast solver agrees with the dense oracle on random instances") {
  std::mt19937_64 rng(7);
  const std::size_t shapes[][4] = {{2, 1, 8, 8}, {4, 2, 8, 8}, {4, 3, 6, 8}, {3, 2, 8, 4}};
  const double mus[] = {1e-4, 1e-2, 1.0};
  for (int t = 0; t < 20; ++t) {
    const auto& sh = shapes[t % 4];
    const std::size_t factor = 1 + static_cast<std::size_t>(t % 2);
    const double mu = mus[t % 3];
    const auto p = random_problem(sh[0], sh[1], sh[2], sh[3], factor, rng);
    const auto fast = solve_fuse(p, mu);
    CHECK(rel_diff(fast, solve_fuse_oracle(p, mu)) <= 1e-7);
    CHECK(sylvester_residual(p, mu, fast) <= 1e-8);
  }
}

TEST_CASE("factor 4 with unequal row and column decimation") {
  std::mt19937_64 rng(71);
  auto p = random_problem(2, 1, 8, 8, 4, rng);
  p.dec = degradation::Decimation{4, 2, 3, 1};
  p.lr_hsi = random_cube(2, 2, 4, rng);
  const auto fast = solve_fuse(p, 0.05);
  CHECK(rel_diff(fast, solve_fuse_oracle(p, 0.05)) <= 1e-7);
}

TEST_CASE("large mu returns the prior") {
  std::mt19937_64 rng(3);
  const auto p = random_problem(3, 2, 8, 8, 2, rng);
  CHECK(rel_diff(solve_fuse_oracle(p, 1e6), p.prior) <= 1e-4);
  CHECK(rel_diff(solve_fuse(p, 1e6), p.prior) <= 1e-4);
}

TEST_CASE("prior equal to truth with noiseless data is a fixed point") {
  std::mt19937_64 rng(4);
  for (std::size_t s : {1u, 2u}) {
    const auto truth = random_cube(4, 8, 8, rng);
    const auto p = consistent_problem(truth, 2, s, rng);
    for (double mu : {1e-3, 1.0}) {
      CHECK(rel_diff(solve_fuse(p, mu), truth) <= 1e-6);
      CHECK(rel_diff(solve_fuse_oracle(p, mu), truth) <= 1e-6);
    }
  }
}

TEST_CASE("objective_terms") {
  std::mt19937_64 rng(5);

  SUBCASE("x equal to the prior gives j2 = 0") {
    const auto p = random_problem(3, 2, 8, 8, 2, rng);
    CHECK(objective_terms(p, p.prior).j2 == 0.0);
  }
  SUBCASE("noiseless data generated from x gives j1 = 0") {
    const auto truth = random_cube(3, 8, 8, rng);
    const auto p = consistent_problem(truth, 2, 2, rng);
    CHECK(objective_terms(p, truth).j1 < 1e-26);
  }
  SUBCASE("matches dense matrices") {
    const auto p = random_problem(3, 2, 8, 6, 2, rng);
    const auto x = random_cube(3, 8, 6, rng);
    const auto ops = dense_operators(p);
    const Eigen::MatrixXd X = to_matrix(x);
    const double j1 = (to_matrix(p.lr_hsi) - X * ops.blur_dec).squaredNorm() +
                      (to_matrix(p.hr_msi) - ops.srf * X).squaredNorm();
    const double j2 = (X - to_matrix(p.prior)).squaredNorm();
    const auto t = objective_terms(p, x);
    CHECK(t.j1 == doctest::Approx(j1).epsilon(1e-12));
    CHECK(t.j2 == doctest::Approx(j2).epsilon(1e-12));
  }
  SUBCASE("shape mismatch") {
    const auto p = random_problem(3, 2, 8, 8, 2, rng);
    CHECK_THROWS_AS(objective_terms(p, random_cube(2, 8, 8, rng)), DimensionError);
    CHECK_THROWS_AS(objective_terms(p, random_cube(3, 4, 8, rng)), DimensionError);
  }
}

TEST_CASE("dense operators reproduce the fast forward model") {
  std::mt19937_64 rng(6);
  const auto p = random_problem(3, 2, 8, 8, 2, rng);
  const auto x = random_cube(3, 8, 8, rng);
  const auto ops = dense_operators(p);
  const Eigen::MatrixXd X = to_matrix(x);
  const auto y = from_matrix(X * ops.blur_dec, 4, 4);
  CHECK(rel_diff(degradation::blur_decimate(x, p.blur, p.dec), y) < 1e-13);
  const auto z = from_matrix(ops.srf * X, 8, 8);
  CHECK(rel_diff(degradation::srf_apply(x, p.srf), z) < 1e-13);
}

TEST_CASE("stationarity of the objective at the solution") {
  std::mt19937_64 rng(8);
  for (int inst = 0; inst < 5; ++inst) {
    const double mu = inst % 2 ? 0.1 : 1e-3;
    const auto p = random_problem(4, 2, 8, 8, 2, rng);
    const auto xhat = solve_fuse(p, mu);
    const double scale = 2.0 * std::sqrt(frobenius_sq(sylvester_rhs(p, mu)));
    for (int d = 0; d < 10; ++d) {
      auto v = random_cube(4, 8, 8, rng, -1.0, 1.0);
      const double vn = std::sqrt(frobenius_sq(v));
      for (double& e : v.data()) e /= vn;
      const double h = 1e-4;
      const double deriv =
          (objective(p, mu, axpy(h, v, xhat)) - objective(p, mu, axpy(-h, v, xhat))) / (2 * h);
      CHECK(std::abs(deriv) <= 1e-5 * scale);
    }
  }
}

TEST_CASE("solution minimizes the objective under perturbation") {
  std::mt19937_64 rng(9);
  const auto p = random_problem(3, 2, 8, 8, 2, rng);
  const double mu = 0.05;
  const auto xhat = solve_fuse(p, mu);
  const double j0 = objective(p, mu, xhat);
  for (double eps : {1e-4, 1e-2, 1.0, 100.0}) {
    const auto v = random_cube(3, 8, 8, rng, -1.0, 1.0);
    CHECK(objective(p, mu, axpy(eps, v, xhat)) > j0);
  }
}

TEST_CASE("distance to the prior shrinks monotonically as mu grows") {
  std::mt19937_64 rng(10);
  const auto p = random_problem(3, 2, 8, 8, 2, rng);
  const FusionSolver solver(p);
  double prev = INFINITY;
  for (double mu : {1.0, 1e2, 1e4, 1e6}) {
    const double d = std::sqrt(frobenius_sq_diff(solver.solve(mu), p.prior));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 1e-4 * std::sqrt(frobenius_sq(p.prior)));
}

TEST_CASE("workspace eigendecomposition reconstructs C1") {
  std::mt19937_64 rng(11);
  const auto p = random_problem(5, 3, 4, 4, 1, rng);
  const FusionSolver solver(p);
  for (double mu : {1e-3, 0.3}) {
    const auto ws = solver.workspace(mu);
    const Eigen::MatrixXd& r = p.srf.weights();
    const Eigen::MatrixXd c1 = r.transpose() * r + mu * Eigen::MatrixXd::Identity(5, 5);
    const Eigen::MatrixXd rec = ws.c1_eigvecs * ws.c1_eigvals.asDiagonal() * ws.c1_eigvecs.transpose();
    CHECK((rec - c1).norm() <= 1e-10 * c1.norm());
    CHECK((ws.c1_eigvecs.transpose() * ws.c1_eigvecs - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-12);
    CHECK(ws.c1_eigvals.minCoeff() > 0.0);
  }
}

TEST_CASE("result does not depend on the number of threads") {
  std::mt19937_64 rng(12);
  const auto p = random_problem(6, 3, 16, 16, 4, rng);
  set_max_threads(1);
  const auto a = solve_fuse(p, 0.02);
  set_max_threads(4);
  const auto b = solve_fuse(p, 0.02);
  set_max_threads(1);
  CHECK(rel_diff(a, b) <= 1e-10);
}

TEST_CASE("error cases") {
  std::mt19937_64 rng(13);

  SUBCASE("mu = 0 with rank-deficient spectral response") {
    const auto p = random_problem(4, 2, 8, 8, 2, rng);
    CHECK_THROWS_AS(solve_fuse(p, 0.0), IllPosedError);
    CHECK_THROWS_AS(solve_fuse_oracle(p, 0.0), IllPosedError);
    CHECK_NOTHROW(solve_fuse(p, 1e-8));
  }
  SUBCASE("negative or non-finite mu") {
    const auto p = random_problem(2, 2, 4, 4, 1, rng);
    CHECK_THROWS_AS(solve_fuse(p, -1.0), ParameterError);
    CHECK_THROWS_AS(solve_fuse(p, NAN), ParameterError);
  }
  SUBCASE("oracle size cap") {
    const auto p = random_problem(2, 1, 64, 64, 2, rng);
    CHECK_THROWS_AS(solve_fuse_oracle(p, 0.1), CapacityError);
  }
  SUBCASE("inconsistent shapes") {
    auto p = random_problem(3, 2, 8, 8, 2, rng);
    p.lr_hsi = random_cube(3, 4, 3, rng);
    CHECK_THROWS_AS(solve_fuse(p, 0.1), DimensionError);
    p = random_problem(3, 2, 8, 8, 2, rng);
    p.hr_msi = random_cube(3, 8, 8, rng);
    CHECK_THROWS_AS(solve_fuse(p, 0.1), DimensionError);
    p = random_problem(3, 2, 8, 8, 2, rng);
    p.dec = degradation::Decimation::uniform(3);
    CHECK_THROWS_AS(solve_fuse(p, 0.1), DimensionError);
  }
}
