#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hsfuse/fft.hpp"
#include "hsfuse/hypercube.hpp"

// Linear observation operators: spatial blur (circular convolution), uniform
// decimation and the spectral response, plus a forward simulator that turns a
// ground-truth cube into an (LR HSI, HR MSI) pair.
namespace hsfuse::degradation {

enum class BlurKind { uniform, gaussian, delta, custom };

std::string to_string(BlurKind kind);
BlurKind blur_kind_from_string(const std::string& name);

// A normalized convolution kernel. Kernel entry (anchor_row, anchor_col) is the
// origin: it lands on frequency index (0,0) when the kernel is wrapped onto an
// image torus. Centered kernels anchor at (rows/2, cols/2), so an 8x8 kernel
// anchors at (4,4).
struct BlurSpec {
  BlurKind kind = BlurKind::delta;
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::size_t anchor_row = 0;
  std::size_t anchor_col = 0;
  std::vector<double> kernel{1.0};

  static BlurSpec delta();
  static BlurSpec uniform(std::size_t size);
  // Samples exp(-r^2 / (2 sigma^2)) on a size x size grid centered at
  // ((size-1)/2, (size-1)/2), then normalizes.
  static BlurSpec gaussian(std::size_t size, double sigma);
  // Row-major weights; must be nonnegative with positive sum. Normalized on
  // construction, anchored at the center.
  static BlurSpec custom(std::size_t rows, std::size_t cols, std::vector<double> weights);

  double at(std::size_t r, std::size_t c) const { return kernel[r * cols + c]; }

  // 2-D DFT of the kernel wrapped onto a height x width torus with the anchor
  // at index (0,0). These are the eigenvalues of the BCCB blur operator.
  std::vector<Complex> eigenvalues(std::size_t height, std::size_t width) const;
};

// Plain-text kernel: rows of whitespace-separated reals. Lines that are empty
// or start with '#' are skipped.
BlurSpec read_kernel_file(const std::filesystem::path& path);

// Keeps samples (i*row_factor + row_phase, j*col_factor + col_phase).
struct Decimation {
  std::size_t row_factor = 1;
  std::size_t col_factor = 1;
  std::size_t row_phase = 0;
  std::size_t col_phase = 0;

  static Decimation uniform(std::size_t factor, std::size_t row_phase = 0,
                            std::size_t col_phase = 0);
  // Phase at which a centered uniform factor x factor blur followed by
  // decimation yields disjoint block means.
  static Decimation block_mean(std::size_t factor);

  std::size_t total() const noexcept { return row_factor * col_factor; }
  // Throws DimensionError / ParameterError when the HR dims are incompatible.
  void validate(std::size_t height, std::size_t width) const;
};

// Spectral response matrix mapping `cols` hyperspectral bands onto `rows`
// camera bands. Weights are nonnegative and each row sums to one.
class Srf {
 public:
  // Validates nonnegativity and row-normalizes.
  explicit Srf(Eigen::MatrixXd weights);

  static Srf identity(std::size_t bands);
  // Three Gaussian responses (blue, green, red) over bands spread uniformly
  // across the spectral range.
  static Srf synthetic_rgb(std::size_t bands);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(weights_.cols()); }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }

 private:
  Eigen::MatrixXd weights_;
};

// CSV: first line starts with the token `band_centers` (optionally followed by
// B band-center values), then one line of B comma-separated weights per
// output band.
Srf read_srf_csv(const std::filesystem::path& path);
void write_srf_csv(const Srf& srf, const std::filesystem::path& path);

HyperCube blur_apply(const HyperCube& x, const BlurSpec& blur);
// Correlation with the kernel (the transpose of blur_apply).
HyperCube blur_adjoint_apply(const HyperCube& x, const BlurSpec& blur);
HyperCube decimate(const HyperCube& x, const Decimation& dec);
// Zero-filled upsampling to HR dims; the transpose of decimate.
HyperCube upsample_zero_fill(const HyperCube& y, const Decimation& dec);
// Y = X B S
HyperCube blur_decimate(const HyperCube& x, const BlurSpec& blur, const Decimation& dec);
// Y (B S)^T, returned at HR dims.
HyperCube blur_decimate_adjoint(const HyperCube& y, const BlurSpec& blur, const Decimation& dec);
// Z = R X
HyperCube srf_apply(const HyperCube& x, const Srf& srf);
// R^T Z
HyperCube srf_adjoint_apply(const HyperCube& z, const Srf& srf);

// Adds i.i.d. zero-mean Gaussian noise with variance mean(x^2) / 10^(snr/10).
void add_noise_snr(HyperCube& x, double snr_db, std::mt19937_64& rng);

struct SimulationOptions {
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
};

struct Observation {
  HyperCube lr_hsi;  // Y
  HyperCube hr_msi;  // Z
};

// Noise, when requested, is drawn for Y first and then Z from one generator
// seeded with options.seed.
Observation simulate(const HyperCube& truth, const BlurSpec& blur, const Decimation& dec,
                     const Srf& srf, const SimulationOptions& options = {});

}  // namespace hsfuse::degradation
