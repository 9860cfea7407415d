#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hsfuse {

using Complex = std::complex<double>;

// Unnormalized 2-D DFT of a (height x width) row-major plane, backed by FFTW.
// forward: X[f] = sum_p x[p] exp(-2 pi i f.p / dims); inverse applies the
// conjugate kernel and the 1/(height*width) factor, so inverse(forward(x)) == x.
// Plans are created once per instance; execution is safe from several threads.
class Fft2d {
 public:
  Fft2d(std::size_t height, std::size_t width);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;
  Fft2d(Fft2d&& other) noexcept;
  Fft2d& operator=(Fft2d&& other) noexcept;

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return height_ * width_; }

  void forward(std::span<Complex> plane) const;
  void inverse(std::span<Complex> plane) const;

  std::vector<Complex> forward_real(std::span<const double> plane) const;
  // Inverse transform keeping the real part.
  void inverse_to_real(std::vector<Complex>& spectrum, std::span<double> out) const;

 private:
  void release() noexcept;

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace hsfuse
