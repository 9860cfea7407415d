#include "hsfuse/fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "hsfuse/errors.hpp"

namespace hsfuse {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<Complex> s) { return reinterpret_cast<fftw_complex*>(s.data()); }

}  // namespace

Fft2d::Fft2d(std::size_t height, std::size_t width) : height_(height), width_(width) {
  if (height == 0 || width == 0) {
    throw DimensionError("Fft2d: zero dimension");
  }
  std::vector<Complex> scratch(size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buf, buf,
                                   FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width), buf, buf,
                                   FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    release();
    throw Error("FFTW failed to create a plan");
  }
}

Fft2d::~Fft2d() { release(); }

Fft2d::Fft2d(Fft2d&& other) noexcept
    : height_(other.height_),
      width_(other.width_),
      forward_plan_(other.forward_plan_),
      inverse_plan_(other.inverse_plan_) {
  other.forward_plan_ = nullptr;
  other.inverse_plan_ = nullptr;
}

Fft2d& Fft2d::operator=(Fft2d&& other) noexcept {
  if (this != &other) {
    release();
    height_ = other.height_;
    width_ = other.width_;
    forward_plan_ = other.forward_plan_;
    inverse_plan_ = other.inverse_plan_;
    other.forward_plan_ = nullptr;
    other.inverse_plan_ = nullptr;
  }
  return *this;
}

void Fft2d::release() noexcept {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  forward_plan_ = nullptr;
  inverse_plan_ = nullptr;
}

void Fft2d::forward(std::span<Complex> plane) const {
  if (plane.size() != size()) throw DimensionError("Fft2d::forward: plane size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(plane), as_fftw(plane));
}

void Fft2d::inverse(std::span<Complex> plane) const {
  if (plane.size() != size()) throw DimensionError("Fft2d::inverse: plane size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(plane), as_fftw(plane));
  const double scale = 1.0 / static_cast<double>(size());
  for (auto& v : plane) v *= scale;
}

std::vector<Complex> Fft2d::forward_real(std::span<const double> plane) const {
  if (plane.size() != size()) throw DimensionError("Fft2d::forward_real: plane size mismatch");
  std::vector<Complex> spec(plane.begin(), plane.end());
  forward(spec);
  return spec;
}

void Fft2d::inverse_to_real(std::vector<Complex>& spectrum, std::span<double> out) const {
  if (out.size() != size()) throw DimensionError("Fft2d::inverse_to_real: size mismatch");
  inverse(spectrum);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = spectrum[n].real();
}

}  // namespace hsfuse
