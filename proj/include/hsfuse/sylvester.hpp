#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "hsfuse/degradation.hpp"
#include "hsfuse/fft.hpp"
#include "hsfuse/hypercube.hpp"

namespace hsfuse::sylvester {

// Everything needed to pose
//   min_X ||Y - X B S||^2 + ||Z - R X||^2 + mu ||X - X_prior||^2
struct FusionProblem {
  HyperCube lr_hsi;  // Y, B bands at LR dims
  HyperCube hr_msi;  // Z, b bands at HR dims
  degradation::BlurSpec blur;
  degradation::Decimation dec;
  degradation::Srf srf = degradation::Srf::identity(1);
  HyperCube prior;   // X_prior, B bands at HR dims

  std::size_t bands() const noexcept { return prior.bands(); }
  std::size_t height() const noexcept { return prior.height(); }
  std::size_t width() const noexcept { return prior.width(); }

  // Throws DimensionError on any inconsistent shape.
  void validate() const;
};

struct ObjectiveTerms {
  double j1 = 0.0;  // ||Y - XBS||^2 + ||Z - RX||^2
  double j2 = 0.0;  // ||X - X_prior||^2
};

ObjectiveTerms objective_terms(const FusionProblem& problem, const HyperCube& x);

// C1 X + X C2 for C1 = R^T R + mu I and C2 = (BS)(BS)^T, evaluated with
// operator applications.
HyperCube sylvester_lhs(const FusionProblem& problem, double mu, const HyperCube& x);
// C3 = R^T Z + Y (BS)^T + mu X_prior
HyperCube sylvester_rhs(const FusionProblem& problem, double mu);
// ||C1 X + X C2 - C3||_F / ||C3||_F (absolute norm when C3 = 0).
double sylvester_residual(const FusionProblem& problem, double mu, const HyperCube& x);

// Per-mu quantities of the closed-form solve.
struct SolverWorkspace {
  Eigen::MatrixXd c1_eigvecs;   // Q, orthonormal columns
  Eigen::VectorXd c1_eigvals;   // lambda_k of R^T R + mu I
  double mu = 0.0;
};

// Closed-form solver for one problem, reusable across mu. Construction does
// the mu-independent work: the data part of C3 and the prior, both rotated
// into the eigenbasis of R^T R (which C1 shares for every mu), the blur
// eigenvalues with the decimation phase folded in, and the per-LR-bin
// aliased energy sum_t |D_t|^2.
class FusionSolver {
 public:
  explicit FusionSolver(FusionProblem problem);

  const FusionProblem& problem() const noexcept { return problem_; }
  SolverWorkspace workspace(double mu) const;
  // Throws ParameterError for mu < 0 and IllPosedError for mu = 0 with a
  // singular R^T R.
  HyperCube solve(double mu) const;

  // Blur eigenvalues times the phase ramp of the decimation offset.
  const std::vector<Complex>& effective_blur_eigenvalues() const noexcept { return blur_eig_; }
  const std::vector<double>& aliased_energy() const noexcept { return aliased_energy_; }

 private:
  FusionProblem problem_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd srf_gram_eigvals_;
  HyperCube data_rhs_rot_;
  HyperCube prior_rot_;
  std::vector<Complex> blur_eig_;
  std::vector<double> aliased_energy_;
  std::vector<std::size_t> lr_bin_;
  Fft2d fft_;
};

HyperCube solve_fuse(const FusionProblem& problem, double mu);

// Dense verification route: materializes C1, C2, C3 and solves
//   (I_N (x) C1 + C2^T (x) I_B) vec(X) = vec(C3)
// with an LU factorization. Capped at bands*pixels <= kOracleMaxUnknowns.
inline constexpr std::size_t kOracleMaxUnknowns = 4096;
HyperCube solve_fuse_oracle(const FusionProblem& problem, double mu);

// Dense matrices of the observation model in the row convention used above:
// X is B x N (one row per band, pixels in row-major order), Y = X * blur_dec,
// Z = srf * X.
struct DenseOperators {
  Eigen::MatrixXd blur_dec;  // N x n, the product B S
  Eigen::MatrixXd srf;       // b x B
};
DenseOperators dense_operators(const FusionProblem& problem);
Eigen::MatrixXd to_matrix(const HyperCube& cube);
HyperCube from_matrix(const Eigen::MatrixXd& m, std::size_t height, std::size_t width);

}  // namespace hsfuse::sylvester
