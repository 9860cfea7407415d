#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "hsfuse/degradation.hpp"
#include "hsfuse/hypercube.hpp"

namespace hsfuse::priors {

// Catmull-Rom cubic convolution weight (a = -0.5).
double cubic_weight(double x);

// Per-band bicubic upsampling by integer factors. Sampling grid is
// align-corners-false: output index o reads source coordinate
// (o + 0.5) / factor - 0.5. Taps outside the image clamp to the edge. Rows
// are interpolated first, then columns.
HyperCube bicubic_upsample(const HyperCube& y, std::size_t row_factor, std::size_t col_factor);

enum class PriorKind { bicubic, external };

struct PriorSource {
  PriorKind kind = PriorKind::bicubic;
  std::filesystem::path path;  // external only

  // "bicubic" or "file:PATH".
  static PriorSource parse(const std::string& spec);
};

// Builds the regularization target at HR dims for LR input `y`. External
// priors are read from an .hsc file and must have y's band count and HR dims
// (PriorShapeError otherwise).
HyperCube make_prior(const PriorSource& source, const HyperCube& y,
                     const degradation::Decimation& dec);

}  // namespace hsfuse::priors
