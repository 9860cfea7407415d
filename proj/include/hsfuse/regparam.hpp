#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsfuse/hypercube.hpp"
#include "hsfuse/sylvester.hpp"

// Regularization-parameter selection by the minimum distance criterion: the
// chosen mu is the point of the response curve (J1(mu), J2(mu)) closest, in a
// scaled distance, to the ideal point (min J1, min J2).
namespace hsfuse::regparam {

enum class SearchSpace { linear, log10 };

struct MdcConfig {
  double a = 1e-8;        // lower end of the mu interval
  double b_upper = 1.0;   // upper end
  double epsilon = 0.01;  // final bracket length (in log10 units for log10 space)
  double delta = 0.618;
  bool apply_alpha_to_result = true;
  SearchSpace space = SearchSpace::linear;

  void validate() const;
};

struct IdealPoint {
  double i1 = 0.0;
  double i2 = 0.0;
};

// (b/B)^2 + (1/s^2)^2 with s the per-dimension decimation factor.
double compute_alpha(std::size_t srf_bands, std::size_t hsi_bands, double s_perdim);
// compute_alpha from a problem's shapes. With unequal row/column factors the
// per-dimension factor is the geometric mean sqrt(row * col).
double compute_alpha(const sylvester::FusionProblem& problem);

// i1 = J1 at mu = cfg.a (stand-in for the mu -> 0 limit), i2 = 0.
IdealPoint ideal_point(const sylvester::FusionSolver& solver, const MdcConfig& cfg);
IdealPoint ideal_point(const sylvester::FusionProblem& problem, const MdcConfig& cfg);

// (j1 - i1)^2 + alpha (j2 - i2)^2
double mdc_distance(double j1, double j2, const IdealPoint& ideal, double alpha);

struct TraceEntry {
  double mu = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double distance = 0.0;
};

struct MdcResult {
  double mu_star = 0.0;        // value handed to the final solve
  double bracket_lo = 0.0;     // final bracket, in mu
  double bracket_hi = 0.0;
  double argmin_estimate = 0.0;  // bracket midpoint before any alpha scaling
  double alpha = 0.0;
  IdealPoint ideal;
  std::vector<TraceEntry> trace;  // every distinct evaluation, in order
  std::size_t iterations = 0;
};

using TermsFn = std::function<sylvester::ObjectiveTerms(double mu)>;

// Golden-section search of D(mu) = mdc_distance(J1(mu), J2(mu)) on
// [cfg.a, cfg.b_upper]. The bracket keeps the side holding the smaller
// interior value and reuses the surviving interior point; evaluations are
// memoized by exact mu.
MdcResult golden_section_mdc(const TermsFn& terms, const IdealPoint& ideal, double alpha,
                             const MdcConfig& cfg);

// Solver failures surface as SolveAtMuError carrying the failing mu.
MdcResult estimate_mu(const sylvester::FusionSolver& solver, const MdcConfig& cfg);
MdcResult estimate_mu(const sylvester::FusionProblem& problem, const MdcConfig& cfg);

struct CurvePoint {
  double mu = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double distance = 0.0;
  std::optional<double> rmse;
  std::optional<double> psnr;
  bool ok = true;
  std::string error;
};

struct ResponseCurve {
  std::vector<CurvePoint> points;
};

struct SweepOptions {
  IdealPoint ideal;
  double alpha = 1.0;
  const HyperCube* truth = nullptr;  // enables per-point rmse/psnr
};

// n points evenly spaced in log10 between lo and hi (inclusive).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

// One solve per grid value. A failing solve is recorded on its point (ok =
// false, NaN terms) and the sweep continues.
ResponseCurve sweep_response_curve(const sylvester::FusionSolver& solver,
                                   const std::vector<double>& mu_grid,
                                   const SweepOptions& options = {});

}  // namespace hsfuse::regparam
