#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsfuse/degradation.hpp"
#include "hsfuse/hypercube.hpp"

// Slow reference implementations used as test oracles.
namespace hsfuse::testing {

// Spatial-domain circular convolution, O(N k^2).
inline HyperCube direct_convolution(const HyperCube& x, const degradation::BlurSpec& k) {
  HyperCube out(x.bands(), x.height(), x.width(), 0.0);
  const long h = static_cast<long>(x.height());
  const long w = static_cast<long>(x.width());
  for (std::size_t b = 0; b < x.bands(); ++b)
    for (long i = 0; i < h; ++i)
      for (long j = 0; j < w; ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < k.rows; ++a)
          for (std::size_t c = 0; c < k.cols; ++c) {
            const long si = (((i - (static_cast<long>(a) - static_cast<long>(k.anchor_row))) % h) + h) % h;
            const long sj = (((j - (static_cast<long>(c) - static_cast<long>(k.anchor_col))) % w) + w) % w;
            acc += k.at(a, c) * x(b, static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
          }
        out(b, static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = acc;
      }
  return out;
}

inline HyperCube block_means(const HyperCube& x, std::size_t s) {
  HyperCube out(x.bands(), x.height() / s, x.width() / s, 0.0);
  for (std::size_t k = 0; k < x.bands(); ++k)
    for (std::size_t i = 0; i < out.height(); ++i)
      for (std::size_t j = 0; j < out.width(); ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < s; ++a)
          for (std::size_t b = 0; b < s; ++b) acc += x(k, i * s + a, j * s + b);
        out(k, i, j) = acc / static_cast<double>(s * s);
      }
  return out;
}

inline double max_abs_diff(const HyperCube& a, const HyperCube& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.data()[n] - b.data()[n]));
  return m;
}

inline double naive_rmse(const HyperCube& t, const HyperCube& e) {
  double acc = 0.0;
  for (std::size_t k = 0; k < t.bands(); ++k)
    for (std::size_t i = 0; i < t.height(); ++i)
      for (std::size_t j = 0; j < t.width(); ++j) {
        const double d = 255.0 * (t(k, i, j) - e(k, i, j));
        acc += d * d;
      }
  return std::sqrt(acc / static_cast<double>(t.size()));
}

inline double naive_psnr(const HyperCube& t, const HyperCube& e) {
  double acc = 0.0;
  for (std::size_t k = 0; k < t.bands(); ++k) {
    double mse = 0.0;
    for (std::size_t i = 0; i < t.height(); ++i)
      for (std::size_t j = 0; j < t.width(); ++j) {
        const double d = 255.0 * (t(k, i, j) - e(k, i, j));
        mse += d * d;
      }
    mse /= static_cast<double>(t.pixels());
    acc += 10.0 * std::log10(255.0 * 255.0 / mse);
  }
  return acc / static_cast<double>(t.bands());
}

inline double naive_ergas(const HyperCube& t, const HyperCube& e, double s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < t.bands(); ++k) {
    double mse = 0.0;
    double mean = 0.0;
    for (std::size_t i = 0; i < t.height(); ++i)
      for (std::size_t j = 0; j < t.width(); ++j) {
        const double d = t(k, i, j) - e(k, i, j);
        mse += d * d;
        mean += t(k, i, j);
      }
    mse /= static_cast<double>(t.pixels());
    mean /= static_cast<double>(t.pixels());
    acc += mse / (mean * mean);
  }
  return 100.0 / s * std::sqrt(acc / static_cast<double>(t.bands()));
}

inline double naive_sam(const HyperCube& t, const HyperCube& e) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < t.height(); ++i)
    for (std::size_t j = 0; j < t.width(); ++j) {
      double dot = 0.0, nt = 0.0, ne = 0.0;
      for (std::size_t k = 0; k < t.bands(); ++k) {
        dot += t(k, i, j) * e(k, i, j);
        nt += t(k, i, j) * t(k, i, j);
        ne += e(k, i, j) * e(k, i, j);
      }
      if (nt == 0.0 || ne == 0.0) continue;
      const double c = std::clamp(dot / std::sqrt(nt * ne), -1.0, 1.0);
      acc += std::acos(c) * 180.0 / std::numbers::pi;
      ++count;
    }
  return acc / static_cast<double>(count);
}

}  // namespace hsfuse::testing
