#pragma once

#include <vector>

#include "hsfuse/hypercube.hpp"

// Reconstruction quality metrics. Cubes live on [0,1]; RMSE and PSNR are
// reported on the 0-255 scale (peak 255).
namespace hsfuse::metrics {

inline constexpr double kPeak = 255.0;
inline constexpr double kPsnrCeiling = 300.0;  // dB, for zero-error bands

struct MetricReport {
  double rmse = 0.0;
  double psnr = 0.0;
  double ergas = 0.0;
  double sam = 0.0;  // degrees
  std::vector<double> per_band_psnr;
};

double rmse(const HyperCube& truth, const HyperCube& est);
// Mean over bands of the per-band PSNR.
double psnr(const HyperCube& truth, const HyperCube& est);
std::vector<double> per_band_psnr(const HyperCube& truth, const HyperCube& est);
// (100/s) sqrt(mean_k (RMSE_k / mean_k)^2). Throws DegenerateBandError when a
// truth band has zero mean.
double ergas(const HyperCube& truth, const HyperCube& est, double s_perdim);
// Mean spectral angle in degrees over pixels where both spectra are nonzero.
double sam(const HyperCube& truth, const HyperCube& est);

MetricReport evaluate(const HyperCube& truth, const HyperCube& est, double s_perdim);

}  // namespace hsfuse::metrics
