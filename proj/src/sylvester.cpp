#include "hsfuse/sylvester.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hsfuse/errors.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse::sylvester {

namespace dg = hsfuse::degradation;

namespace {

// Relative threshold below which an eigenvalue of R^T R counts as zero.
constexpr double kSingularTol = 1e-12;

std::string dims(const HyperCube& c) {
  return std::to_string(c.bands()) + "x" + std::to_string(c.height()) + "x" +
         std::to_string(c.width());
}

// out_k = sum_j m(j, k) * x_j, i.e. the band mixing X -> M^T X.
HyperCube mix_bands_transposed(const Eigen::MatrixXd& m, const HyperCube& x) {
  const Eigen::MatrixXd mixed = m.transpose() * to_matrix(x);
  return from_matrix(mixed, x.height(), x.width());
}

}  // namespace

void FusionProblem::validate() const {
  if (prior.empty() || lr_hsi.empty() || hr_msi.empty()) {
    throw DimensionError("fusion problem has an empty cube");
  }
  dec.validate(prior.height(), prior.width());
  if (lr_hsi.bands() != prior.bands() || lr_hsi.height() * dec.row_factor != prior.height() ||
      lr_hsi.width() * dec.col_factor != prior.width()) {
    throw DimensionError("LR HSI " + dims(lr_hsi) + " inconsistent with prior " + dims(prior) +
                         " under the decimation");
  }
  if (!hr_msi.same_spatial(prior)) {
    throw DimensionError("HR image " + dims(hr_msi) + " and prior " + dims(prior) +
                         " differ in spatial dims");
  }
  if (hr_msi.bands() != srf.rows() || prior.bands() != srf.cols()) {
    throw DimensionError("SRF is " + std::to_string(srf.rows()) + "x" +
                         std::to_string(srf.cols()) + " but cubes have " +
                         std::to_string(hr_msi.bands()) + " and " +
                         std::to_string(prior.bands()) + " bands");
  }
}

ObjectiveTerms objective_terms(const FusionProblem& problem, const HyperCube& x) {
  if (!x.same_shape(problem.prior)) {
    throw DimensionError("objective_terms: estimate " + dims(x) + " does not match prior " +
                         dims(problem.prior));
  }
  ObjectiveTerms t;
  t.j1 = frobenius_sq_diff(problem.lr_hsi, dg::blur_decimate(x, problem.blur, problem.dec)) +
         frobenius_sq_diff(problem.hr_msi, dg::srf_apply(x, problem.srf));
  t.j2 = frobenius_sq_diff(x, problem.prior);
  return t;
}

HyperCube sylvester_lhs(const FusionProblem& problem, double mu, const HyperCube& x) {
  const HyperCube spectral = dg::srf_adjoint_apply(dg::srf_apply(x, problem.srf), problem.srf);
  const HyperCube spatial = dg::blur_decimate_adjoint(
      dg::blur_decimate(x, problem.blur, problem.dec), problem.blur, problem.dec);
  HyperCube out = axpy(1.0, spectral, spatial);
  return axpy(mu, x, out);
}

HyperCube sylvester_rhs(const FusionProblem& problem, double mu) {
  problem.validate();
  const HyperCube data = axpy(1.0, dg::srf_adjoint_apply(problem.hr_msi, problem.srf),
                              dg::blur_decimate_adjoint(problem.lr_hsi, problem.blur, problem.dec));
  return axpy(mu, problem.prior, data);
}

double sylvester_residual(const FusionProblem& problem, double mu, const HyperCube& x) {
  const HyperCube rhs = sylvester_rhs(problem, mu);
  const double num = std::sqrt(frobenius_sq_diff(sylvester_lhs(problem, mu, x), rhs));
  const double den = std::sqrt(frobenius_sq(rhs));
  return den > 0.0 ? num / den : num;
}

FusionSolver::FusionSolver(FusionProblem problem)
    : problem_(std::move(problem)), fft_(problem_.prior.empty() ? 1 : problem_.height(),
                                         problem_.prior.empty() ? 1 : problem_.width()) {
  problem_.validate();
  const auto& dec = problem_.dec;
  const std::size_t height = problem_.height();
  const std::size_t width = problem_.width();

  // C1 = R^T R + mu I shares eigenvectors with R^T R for every mu.
  const Eigen::MatrixXd gram = problem_.srf.weights().transpose() * problem_.srf.weights();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw Error("eigendecomposition of R^T R failed");
  }
  q_ = eig.eigenvectors();
  srf_gram_eigvals_ = eig.eigenvalues().cwiseMax(0.0);

  const HyperCube data_rhs = sylvester_rhs(problem_, 0.0);
  data_rhs_rot_ = mix_bands_transposed(q_, data_rhs);
  prior_rot_ = mix_bands_transposed(q_, problem_.prior);

  // Folding the decimation phase into the blur: keeping sample
  // (i*s + p) of (k * x) equals keeping sample i*s of (k' * x) with k' the
  // kernel advanced by p, whose DFT is D(f) exp(+2 pi i f.p / dims).
  blur_eig_ = problem_.blur.eigenvalues(height, width);
  const std::size_t lr_h = height / dec.row_factor;
  const std::size_t lr_w = width / dec.col_factor;
  lr_bin_.resize(height * width);
  aliased_energy_.assign(lr_h * lr_w, 0.0);
  for (std::size_t fr = 0; fr < height; ++fr) {
    for (std::size_t fc = 0; fc < width; ++fc) {
      const std::size_t f = fr * width + fc;
      const double angle = 2.0 * std::numbers::pi *
                           (static_cast<double>(fr * dec.row_phase) / static_cast<double>(height) +
                            static_cast<double>(fc * dec.col_phase) / static_cast<double>(width));
      blur_eig_[f] *= std::polar(1.0, angle);
      lr_bin_[f] = (fr % lr_h) * lr_w + (fc % lr_w);
      aliased_energy_[lr_bin_[f]] += std::norm(blur_eig_[f]);
    }
  }
}

SolverWorkspace FusionSolver::workspace(double mu) const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ParameterError("mu must be finite and >= 0, got " + std::to_string(mu));
  }
  SolverWorkspace ws;
  ws.mu = mu;
  ws.c1_eigvecs = q_;
  ws.c1_eigvals = srf_gram_eigvals_.array() + mu;
  const double scale = std::max(1.0, srf_gram_eigvals_.maxCoeff());
  if (mu == 0.0 && ws.c1_eigvals.minCoeff() <= kSingularTol * scale) {
    throw IllPosedError("mu = 0 with rank-deficient R^T R: the fusion problem has no unique solution");
  }
  return ws;
}

HyperCube FusionSolver::solve(double mu) const {
  const SolverWorkspace ws = workspace(mu);
  const std::size_t bands = problem_.bands();
  const std::size_t lr_bins = aliased_energy_.size();
  const double d = static_cast<double>(problem_.dec.total());

  HyperCube x_rot(bands, problem_.height(), problem_.width());
  parallel_for(bands, [&](std::size_t k) {
    const double lambda = ws.c1_eigvals(static_cast<Eigen::Index>(k));
    std::vector<double> c3(problem_.height() * problem_.width());
    const auto data = data_rhs_rot_.band(k);
    const auto prior = prior_rot_.band(k);
    for (std::size_t p = 0; p < c3.size(); ++p) c3[p] = data[p] + mu * prior[p];

    auto spec = fft_.forward_real(c3);
    // Woodbury on (lambda I + (1/d) U U^H) with U = conj(D) P, where P sums
    // the d aliased frequencies of each LR bin.
    std::vector<Complex> folded(lr_bins, Complex{0.0, 0.0});
    for (std::size_t f = 0; f < spec.size(); ++f) folded[lr_bin_[f]] += blur_eig_[f] * spec[f];
    for (std::size_t b = 0; b < lr_bins; ++b) folded[b] /= lambda * d + aliased_energy_[b];
    const double inv_lambda = 1.0 / lambda;
    for (std::size_t f = 0; f < spec.size(); ++f) {
      spec[f] = inv_lambda * (spec[f] - std::conj(blur_eig_[f]) * folded[lr_bin_[f]]);
    }
    fft_.inverse_to_real(spec, x_rot.band(k));
  });
  return mix_bands_transposed(q_.transpose(), x_rot);
}

HyperCube solve_fuse(const FusionProblem& problem, double mu) {
  return FusionSolver(problem).solve(mu);
}

Eigen::MatrixXd to_matrix(const HyperCube& cube) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cube.bands()),
                    static_cast<Eigen::Index>(cube.pixels()));
  for (std::size_t k = 0; k < cube.bands(); ++k) {
    const auto band = cube.band(k);
    for (std::size_t p = 0; p < band.size(); ++p) {
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p)) = band[p];
    }
  }
  return m;
}

HyperCube from_matrix(const Eigen::MatrixXd& m, std::size_t height, std::size_t width) {
  if (static_cast<std::size_t>(m.cols()) != height * width) {
    throw DimensionError("from_matrix: column count does not match spatial dims");
  }
  HyperCube cube(static_cast<std::size_t>(m.rows()), height, width);
  for (std::size_t k = 0; k < cube.bands(); ++k) {
    auto band = cube.band(k);
    for (std::size_t p = 0; p < band.size(); ++p) {
      band[p] = m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
    }
  }
  return cube;
}

DenseOperators dense_operators(const FusionProblem& problem) {
  problem.validate();
  const std::size_t height = problem.height();
  const std::size_t width = problem.width();
  const std::size_t n_hr = height * width;
  const auto& blur = problem.blur;
  const auto& dec = problem.dec;

  // Row convention: (x B)_i = sum_m x_m B(m, i) with output i = m + offset.
  Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_hr),
                                               static_cast<Eigen::Index>(n_hr));
  const auto wrap = [](long v, long n) { return static_cast<std::size_t>(((v % n) + n) % n); };
  for (std::size_t mr = 0; mr < height; ++mr) {
    for (std::size_t mc = 0; mc < width; ++mc) {
      for (std::size_t a = 0; a < blur.rows; ++a) {
        for (std::size_t b = 0; b < blur.cols; ++b) {
          const std::size_t ir = wrap(static_cast<long>(mr + a) - static_cast<long>(blur.anchor_row),
                                      static_cast<long>(height));
          const std::size_t ic = wrap(static_cast<long>(mc + b) - static_cast<long>(blur.anchor_col),
                                      static_cast<long>(width));
          bmat(static_cast<Eigen::Index>(mr * width + mc), static_cast<Eigen::Index>(ir * width + ic)) +=
              blur.at(a, b);
        }
      }
    }
  }

  const std::size_t lr_h = height / dec.row_factor;
  const std::size_t lr_w = width / dec.col_factor;
  Eigen::MatrixXd smat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_hr),
                                               static_cast<Eigen::Index>(lr_h * lr_w));
  for (std::size_t i = 0; i < lr_h; ++i) {
    for (std::size_t j = 0; j < lr_w; ++j) {
      const std::size_t hr = (i * dec.row_factor + dec.row_phase) * width + j * dec.col_factor + dec.col_phase;
      smat(static_cast<Eigen::Index>(hr), static_cast<Eigen::Index>(i * lr_w + j)) = 1.0;
    }
  }
  return DenseOperators{bmat * smat, problem.srf.weights()};
}

HyperCube solve_fuse_oracle(const FusionProblem& problem, double mu) {
  problem.validate();
  const std::size_t bands = problem.bands();
  const std::size_t n_hr = problem.height() * problem.width();
  if (bands * n_hr > kOracleMaxUnknowns) {
    throw CapacityError("dense oracle limited to " + std::to_string(kOracleMaxUnknowns) +
                        " unknowns, problem has " + std::to_string(bands * n_hr));
  }
  if (!(mu >= 0.0)) throw ParameterError("mu must be >= 0");

  const DenseOperators ops = dense_operators(problem);
  const auto nb = static_cast<Eigen::Index>(bands);
  const auto nn = static_cast<Eigen::Index>(n_hr);

  const Eigen::MatrixXd c1 = ops.srf.transpose() * ops.srf + mu * Eigen::MatrixXd::Identity(nb, nb);
  const Eigen::MatrixXd c2 = ops.blur_dec * ops.blur_dec.transpose();
  const Eigen::MatrixXd c3 = ops.srf.transpose() * to_matrix(problem.hr_msi) +
                             to_matrix(problem.lr_hsi) * ops.blur_dec.transpose() +
                             mu * to_matrix(problem.prior);

  // vec() is column-major: vec(X)[p * B + k] = X(k, p).
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(nb * nn, nb * nn);
  for (Eigen::Index p = 0; p < nn; ++p) {
    system.block(p * nb, p * nb, nb, nb) += c1;
    for (Eigen::Index q = 0; q < nn; ++q) {
      const double v = c2(q, p);  // (C2^T)(p, q)
      if (v == 0.0) continue;
      for (Eigen::Index k = 0; k < nb; ++k) system(p * nb + k, q * nb + k) += v;
    }
  }
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(c3.data(), c3.size());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  if (!(lu.rcond() > 1e-15)) {
    throw IllPosedError("dense Sylvester system is singular");
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::MatrixXd>(sol.data(), nb, nn);
  return from_matrix(x, problem.height(), problem.width());
}

}  // namespace hsfuse::sylvester
