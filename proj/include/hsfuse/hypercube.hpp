#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace hsfuse {

// A (bands x height x width) cube of doubles in band-major order:
//   sample(k, i, j) = data[k * height * width + i * width + j]
// Serves every role in the fusion pipeline (ground truth, LR HSI, HR RGB,
// prior, estimate). Dimensions are fixed at construction.
class HyperCube {
 public:
  HyperCube() = default;
  HyperCube(std::size_t bands, std::size_t height, std::size_t width, double fill = 0.0);
  // Takes ownership of `data`; its length must equal bands*height*width.
  HyperCube(std::size_t bands, std::size_t height, std::size_t width, std::vector<double> data);

  std::size_t bands() const noexcept { return bands_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t pixels() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t k, std::size_t i, std::size_t j) {
    return data_[(k * height_ + i) * width_ + j];
  }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return data_[(k * height_ + i) * width_ + j];
  }

  std::span<double> band(std::size_t k) { return {data_.data() + k * pixels(), pixels()}; }
  std::span<const double> band(std::size_t k) const {
    return {data_.data() + k * pixels(), pixels()};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const HyperCube& other) const noexcept {
    return bands_ == other.bands_ && height_ == other.height_ && width_ == other.width_;
  }
  bool same_spatial(const HyperCube& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const HyperCube& other) const = default;

 private:
  std::size_t bands_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

inline constexpr std::size_t kCubeHeaderSize = 64;
inline constexpr std::uint32_t kCubeFormatVersion = 1;

struct CubeHeader {
  std::uint32_t version = kCubeFormatVersion;
  std::uint32_t bands = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  DType dtype = DType::f64;
  double scale_hint = 1.0;

  std::size_t payload_bytes() const noexcept;
};

HyperCube cube_new(std::size_t bands, std::size_t height, std::size_t width, double fill);

// Throws FormatError, CorruptionError, ValueError or IoError.
HyperCube cube_read(const std::filesystem::path& path);
CubeHeader cube_read_header(const std::filesystem::path& path);

void cube_write(const HyperCube& cube, const std::filesystem::path& path,
                DType dtype = DType::f64, double scale_hint = 1.0);

// Elementwise helpers used across modules.
double frobenius_sq(const HyperCube& a);
double frobenius_sq_diff(const HyperCube& a, const HyperCube& b);
// Returns a*x + y.
HyperCube axpy(double a, const HyperCube& x, const HyperCube& y);

}  // namespace hsfuse
