#include "hsfuse/priors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "hsfuse/errors.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse::priors {

namespace {

constexpr double kCubicA = -0.5;

struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

// Interpolation taps for every output position along one axis.
std::vector<Taps> make_taps(std::size_t src_len, std::size_t factor) {
  std::vector<Taps> taps(src_len * factor);
  const auto last = static_cast<long>(src_len) - 1;
  for (std::size_t o = 0; o < taps.size(); ++o) {
    const double src = (static_cast<double>(o) + 0.5) / static_cast<double>(factor) - 0.5;
    const double base = std::floor(src);
    const double t = src - base;
    const auto i0 = static_cast<long>(base);
    for (int m = 0; m < 4; ++m) {
      const long idx = std::clamp(i0 - 1 + m, 0L, last);
      taps[o].index[m] = static_cast<std::size_t>(idx);
      taps[o].weight[m] = cubic_weight(t - static_cast<double>(m - 1));
    }
  }
  return taps;
}

}  // namespace

double cubic_weight(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return ((kCubicA + 2.0) * ax - (kCubicA + 3.0)) * ax * ax + 1.0;
  if (ax < 2.0) return ((kCubicA * ax - 5.0 * kCubicA) * ax + 8.0 * kCubicA) * ax - 4.0 * kCubicA;
  return 0.0;
}

HyperCube bicubic_upsample(const HyperCube& y, std::size_t row_factor, std::size_t col_factor) {
  if (y.empty()) throw DimensionError("bicubic_upsample: empty cube");
  if (row_factor == 0 || col_factor == 0) {
    throw ParameterError("bicubic_upsample: factors must be >= 1");
  }
  const std::size_t h = y.height();
  const std::size_t w = y.width();
  const std::size_t out_h = h * row_factor;
  const std::size_t out_w = w * col_factor;
  const auto col_taps = make_taps(w, col_factor);
  const auto row_taps = make_taps(h, row_factor);

  HyperCube out(y.bands(), out_h, out_w);
  parallel_for(y.bands(), [&](std::size_t k) {
    // Horizontal pass: h x out_w.
    std::vector<double> tmp(h * out_w);
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < out_w; ++j) {
        const auto& tp = col_taps[j];
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) acc += tp.weight[m] * y(k, i, tp.index[m]);
        tmp[i * out_w + j] = acc;
      }
    }
    for (std::size_t i = 0; i < out_h; ++i) {
      const auto& tp = row_taps[i];
      for (std::size_t j = 0; j < out_w; ++j) {
        double acc = 0.0;
        for (int m = 0; m < 4; ++m) acc += tp.weight[m] * tmp[tp.index[m] * out_w + j];
        out(k, i, j) = acc;
      }
    }
  });
  return out;
}

PriorSource PriorSource::parse(const std::string& spec) {
  if (spec == "bicubic") return PriorSource{};
  constexpr std::string_view prefix = "file:";
  if (spec.starts_with(prefix) && spec.size() > prefix.size()) {
    return PriorSource{PriorKind::external, spec.substr(prefix.size())};
  }
  throw ParameterError("prior must be 'bicubic' or 'file:PATH', got '" + spec + "'");
}

HyperCube make_prior(const PriorSource& source, const HyperCube& y,
                     const degradation::Decimation& dec) {
  if (source.kind == PriorKind::bicubic) {
    return bicubic_upsample(y, dec.row_factor, dec.col_factor);
  }
  HyperCube prior = cube_read(source.path);
  const std::size_t want_h = y.height() * dec.row_factor;
  const std::size_t want_w = y.width() * dec.col_factor;
  if (prior.bands() != y.bands() || prior.height() != want_h || prior.width() != want_w) {
    throw PriorShapeError("external prior " + source.path.string() + " is " +
                          std::to_string(prior.bands()) + "x" + std::to_string(prior.height()) +
                          "x" + std::to_string(prior.width()) + ", expected " +
                          std::to_string(y.bands()) + "x" + std::to_string(want_h) + "x" +
                          std::to_string(want_w));
  }
  return prior;
}

}  // namespace hsfuse::priors
