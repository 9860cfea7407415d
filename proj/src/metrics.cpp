#include "hsfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hsfuse/errors.hpp"

namespace hsfuse::metrics {

namespace {

void require_same_shape(const HyperCube& truth, const HyperCube& est, const char* who) {
  if (truth.empty() || !truth.same_shape(est)) {
    throw DimensionError(std::string(who) + ": cube shapes differ");
  }
}

// Mean squared error of band k on the [0,1] scale.
double band_mse(const HyperCube& truth, const HyperCube& est, std::size_t k) {
  const auto t = truth.band(k);
  const auto e = est.band(k);
  double acc = 0.0;
  for (std::size_t p = 0; p < t.size(); ++p) {
    const double d = t[p] - e[p];
    acc += d * d;
  }
  return acc / static_cast<double>(t.size());
}

}  // namespace

double rmse(const HyperCube& truth, const HyperCube& est) {
  require_same_shape(truth, est, "rmse");
  return kPeak * std::sqrt(frobenius_sq_diff(truth, est) / static_cast<double>(truth.size()));
}

std::vector<double> per_band_psnr(const HyperCube& truth, const HyperCube& est) {
  require_same_shape(truth, est, "psnr");
  std::vector<double> out(truth.bands());
  for (std::size_t k = 0; k < truth.bands(); ++k) {
    const double mse = kPeak * kPeak * band_mse(truth, est, k);
    out[k] = mse > 0.0 ? std::min(kPsnrCeiling, 10.0 * std::log10(kPeak * kPeak / mse)) : kPsnrCeiling;
  }
  return out;
}

double psnr(const HyperCube& truth, const HyperCube& est) {
  const auto bands = per_band_psnr(truth, est);
  double acc = 0.0;
  for (double v : bands) acc += v;
  return acc / static_cast<double>(bands.size());
}

double ergas(const HyperCube& truth, const HyperCube& est, double s_perdim) {
  require_same_shape(truth, est, "ergas");
  if (!(s_perdim > 0.0)) throw ParameterError("ergas: scale factor must be positive");
  std::string degenerate;
  double acc = 0.0;
  for (std::size_t k = 0; k < truth.bands(); ++k) {
    double mean = 0.0;
    for (double v : truth.band(k)) mean += v;
    mean /= static_cast<double>(truth.pixels());
    if (mean == 0.0) {
      degenerate += (degenerate.empty() ? "" : ",") + std::to_string(k);
      continue;
    }
    const double ratio = std::sqrt(band_mse(truth, est, k)) / mean;
    acc += ratio * ratio;
  }
  if (!degenerate.empty()) {
    throw DegenerateBandError("ergas: truth bands with zero mean: " + degenerate);
  }
  return 100.0 / s_perdim * std::sqrt(acc / static_cast<double>(truth.bands()));
}

double sam(const HyperCube& truth, const HyperCube& est) {
  require_same_shape(truth, est, "sam");
  double acc = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < truth.height(); ++i) {
    for (std::size_t j = 0; j < truth.width(); ++j) {
      double nt = 0.0;
      double ne = 0.0;
      for (std::size_t k = 0; k < truth.bands(); ++k) {
        nt += truth(k, i, j) * truth(k, i, j);
        ne += est(k, i, j) * est(k, i, j);
      }
      if (nt == 0.0 || ne == 0.0) continue;
      // 2 atan2(|u - v|, |u + v|) on unit vectors; acos loses accuracy near 0.
      const double st = 1.0 / std::sqrt(nt);
      const double se = 1.0 / std::sqrt(ne);
      double diff = 0.0;
      double sum = 0.0;
      for (std::size_t k = 0; k < truth.bands(); ++k) {
        const double u = truth(k, i, j) * st;
        const double v = est(k, i, j) * se;
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
      }
      acc += 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
      ++counted;
    }
  }
  if (counted == 0) {
    throw UndefinedMetricError("sam: every pixel has a zero spectrum");
  }
  return acc / static_cast<double>(counted) * 180.0 / std::numbers::pi;
}

MetricReport evaluate(const HyperCube& truth, const HyperCube& est, double s_perdim) {
  MetricReport r;
  r.rmse = rmse(truth, est);
  r.per_band_psnr = per_band_psnr(truth, est);
  double acc = 0.0;
  for (double v : r.per_band_psnr) acc += v;
  r.psnr = acc / static_cast<double>(r.per_band_psnr.size());
  r.ergas = ergas(truth, est, s_perdim);
  r.sam = sam(truth, est);
  return r;
}

}  // namespace hsfuse::metrics
