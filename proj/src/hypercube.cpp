#include "hsfuse/hypercube.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "hsfuse/errors.hpp"

namespace hsfuse {

namespace {

constexpr std::array<char, 8> kMagic = {'H', 'S', 'C', 'U', 'B', 'E', '\0', '\1'};

void check_dims(std::size_t bands, std::size_t height, std::size_t width) {
  if (bands == 0 || height == 0 || width == 0) {
    throw DimensionError("cube dimensions must be >= 1, got " + std::to_string(bands) + "x" +
                         std::to_string(height) + "x" + std::to_string(width));
  }
}

template <typename U>
void put_le(unsigned char* dst, U value) {
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    dst[b] = static_cast<unsigned char>((value >> (8 * b)) & 0xffu);
  }
}

template <typename U>
U get_le(const unsigned char* src) {
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    value |= static_cast<U>(src[b]) << (8 * b);
  }
  return value;
}

std::array<unsigned char, kCubeHeaderSize> encode_header(const CubeHeader& h) {
  std::array<unsigned char, kCubeHeaderSize> raw{};
  std::memcpy(raw.data(), kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(raw.data() + 8, h.version);
  put_le<std::uint32_t>(raw.data() + 12, h.bands);
  put_le<std::uint32_t>(raw.data() + 16, h.height);
  put_le<std::uint32_t>(raw.data() + 20, h.width);
  raw[24] = static_cast<unsigned char>(h.dtype);
  put_le<std::uint64_t>(raw.data() + 25, std::bit_cast<std::uint64_t>(h.scale_hint));
  return raw;
}

CubeHeader decode_header(const std::array<unsigned char, kCubeHeaderSize>& raw) {
  if (std::memcmp(raw.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("bad magic: not an .hsc cube");
  }
  CubeHeader h;
  h.version = get_le<std::uint32_t>(raw.data() + 8);
  if (h.version == 0 || h.version > kCubeFormatVersion) {
    throw FormatError("unsupported cube format version " + std::to_string(h.version));
  }
  h.bands = get_le<std::uint32_t>(raw.data() + 12);
  h.height = get_le<std::uint32_t>(raw.data() + 16);
  h.width = get_le<std::uint32_t>(raw.data() + 20);
  if (raw[24] > 1) {
    throw FormatError("unknown dtype code " + std::to_string(raw[24]));
  }
  h.dtype = static_cast<DType>(raw[24]);
  h.scale_hint = std::bit_cast<double>(get_le<std::uint64_t>(raw.data() + 25));
  if (h.bands == 0 || h.height == 0 || h.width == 0) {
    throw CorruptionError("header declares a zero dimension");
  }
  return h;
}

std::array<unsigned char, kCubeHeaderSize> read_raw_header(std::ifstream& in,
                                                           const std::filesystem::path& path) {
  std::array<unsigned char, kCubeHeaderSize> raw{};
  in.read(reinterpret_cast<char*>(raw.data()), raw.size());
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw CorruptionError("truncated header in " + path.string());
  }
  return raw;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return in;
}

}  // namespace

HyperCube::HyperCube(std::size_t bands, std::size_t height, std::size_t width, double fill)
    : bands_(bands), height_(height), width_(width) {
  check_dims(bands, height, width);
  data_.assign(bands * height * width, fill);
}

HyperCube::HyperCube(std::size_t bands, std::size_t height, std::size_t width,
                     std::vector<double> data)
    : bands_(bands), height_(height), width_(width), data_(std::move(data)) {
  check_dims(bands, height, width);
  if (data_.size() != bands * height * width) {
    throw DimensionError("data length " + std::to_string(data_.size()) +
                         " does not match dimensions");
  }
}

std::size_t CubeHeader::payload_bytes() const noexcept {
  const std::size_t elem = dtype == DType::f32 ? sizeof(float) : sizeof(double);
  return static_cast<std::size_t>(bands) * height * width * elem;
}

HyperCube cube_new(std::size_t bands, std::size_t height, std::size_t width, double fill) {
  if (!std::isfinite(fill)) {
    throw ValueError("fill value must be finite");
  }
  return HyperCube(bands, height, width, fill);
}

CubeHeader cube_read_header(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  return decode_header(read_raw_header(in, path));
}

HyperCube cube_read(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  const CubeHeader h = decode_header(read_raw_header(in, path));

  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) {
    throw IoError("cannot stat " + path.string() + ": " + ec.message());
  }
  if (file_size != kCubeHeaderSize + h.payload_bytes()) {
    throw CorruptionError("payload size mismatch in " + path.string() + ": header declares " +
                          std::to_string(h.payload_bytes()) + " bytes, file holds " +
                          std::to_string(file_size - std::min<std::uintmax_t>(file_size, kCubeHeaderSize)));
  }

  std::vector<unsigned char> raw(h.payload_bytes());
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw CorruptionError("truncated payload in " + path.string());
  }

  const std::size_t count = static_cast<std::size_t>(h.bands) * h.height * h.width;
  std::vector<double> data(count);
  if (h.dtype == DType::f64) {
    for (std::size_t n = 0; n < count; ++n) {
      data[n] = std::bit_cast<double>(get_le<std::uint64_t>(raw.data() + 8 * n));
    }
  } else {
    for (std::size_t n = 0; n < count; ++n) {
      data[n] = std::bit_cast<float>(get_le<std::uint32_t>(raw.data() + 4 * n));
    }
  }
  for (std::size_t n = 0; n < count; ++n) {
    if (!std::isfinite(data[n])) {
      throw ValueError("non-finite sample at index " + std::to_string(n) + " in " + path.string());
    }
  }
  return HyperCube(h.bands, h.height, h.width, std::move(data));
}

void cube_write(const HyperCube& cube, const std::filesystem::path& path, DType dtype,
                double scale_hint) {
  if (cube.empty()) {
    throw DimensionError("cannot write an empty cube");
  }
  CubeHeader h;
  h.bands = static_cast<std::uint32_t>(cube.bands());
  h.height = static_cast<std::uint32_t>(cube.height());
  h.width = static_cast<std::uint32_t>(cube.width());
  h.dtype = dtype;
  h.scale_hint = scale_hint;

  const auto header = encode_header(h);
  std::vector<unsigned char> payload(h.payload_bytes());
  const auto samples = cube.data();
  if (dtype == DType::f64) {
    for (std::size_t n = 0; n < samples.size(); ++n) {
      put_le<std::uint64_t>(payload.data() + 8 * n, std::bit_cast<std::uint64_t>(samples[n]));
    }
  } else {
    for (std::size_t n = 0; n < samples.size(); ++n) {
      const auto v = static_cast<float>(samples[n]);
      put_le<std::uint32_t>(payload.data() + 4 * n, std::bit_cast<std::uint32_t>(v));
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(header.data()), header.size());
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) {
    throw IoError("write failed for " + path.string());
  }
}

double frobenius_sq(const HyperCube& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v * v;
  return acc;
}

double frobenius_sq_diff(const HyperCube& a, const HyperCube& b) {
  if (!a.same_shape(b)) {
    throw DimensionError("frobenius_sq_diff: shape mismatch");
  }
  const auto x = a.data();
  const auto y = b.data();
  double acc = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double d = x[n] - y[n];
    acc += d * d;
  }
  return acc;
}

HyperCube axpy(double a, const HyperCube& x, const HyperCube& y) {
  if (!x.same_shape(y)) {
    throw DimensionError("axpy: shape mismatch");
  }
  HyperCube out = y;
  auto o = out.data();
  const auto xs = x.data();
  for (std::size_t n = 0; n < o.size(); ++n) o[n] += a * xs[n];
  return out;
}

}  // namespace hsfuse
