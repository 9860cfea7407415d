#include "hsfuse/degradation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hsfuse/errors.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse::degradation {

namespace {

std::vector<double> normalized(std::vector<double> w) {
  double sum = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ParameterError("blur kernel weights must be finite and nonnegative");
    }
    sum += v;
  }
  if (sum <= 0.0) {
    throw ParameterError("blur kernel weights must have a positive sum");
  }
  for (double& v : w) v /= sum;
  return w;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

double parse_real(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw FormatError("cannot parse number '" + token + "' in " + path.string());
  }
}

// Multiplies every band spectrum by `eig` (or its conjugate).
HyperCube apply_spectral_filter(const HyperCube& x, const std::vector<Complex>& eig,
                                bool conjugate) {
  HyperCube out(x.bands(), x.height(), x.width());
  const Fft2d fft(x.height(), x.width());
  parallel_for(x.bands(), [&](std::size_t k) {
    auto spec = fft.forward_real(x.band(k));
    for (std::size_t f = 0; f < spec.size(); ++f) {
      spec[f] *= conjugate ? std::conj(eig[f]) : eig[f];
    }
    fft.inverse_to_real(spec, out.band(k));
  });
  return out;
}

}  // namespace

std::string to_string(BlurKind kind) {
  switch (kind) {
    case BlurKind::uniform: return "uniform";
    case BlurKind::gaussian: return "gaussian";
    case BlurKind::delta: return "delta";
    case BlurKind::custom: return "custom";
  }
  return "custom";
}

BlurKind blur_kind_from_string(const std::string& name) {
  if (name == "uniform") return BlurKind::uniform;
  if (name == "gaussian") return BlurKind::gaussian;
  if (name == "delta") return BlurKind::delta;
  if (name == "custom") return BlurKind::custom;
  throw ParameterError("unknown blur kind '" + name + "'");
}

BlurSpec BlurSpec::delta() { return BlurSpec{}; }

BlurSpec BlurSpec::uniform(std::size_t size) {
  if (size == 0) throw ParameterError("uniform blur size must be >= 1");
  BlurSpec b;
  b.kind = BlurKind::uniform;
  b.rows = b.cols = size;
  b.anchor_row = b.anchor_col = size / 2;
  b.kernel.assign(size * size, 1.0 / static_cast<double>(size * size));
  return b;
}

BlurSpec BlurSpec::gaussian(std::size_t size, double sigma) {
  if (size == 0) throw ParameterError("gaussian blur size must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("gaussian sigma must be positive");
  }
  BlurSpec b;
  b.kind = BlurKind::gaussian;
  b.rows = b.cols = size;
  b.anchor_row = b.anchor_col = size / 2;
  b.kernel.resize(size * size);
  const double center = (static_cast<double>(size) - 1.0) / 2.0;
  for (std::size_t r = 0; r < size; ++r) {
    for (std::size_t c = 0; c < size; ++c) {
      const double dr = static_cast<double>(r) - center;
      const double dc = static_cast<double>(c) - center;
      b.kernel[r * size + c] = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    }
  }
  b.kernel = normalized(std::move(b.kernel));
  return b;
}

BlurSpec BlurSpec::custom(std::size_t rows, std::size_t cols, std::vector<double> weights) {
  if (rows == 0 || cols == 0 || weights.size() != rows * cols) {
    throw ParameterError("custom kernel shape does not match weight count");
  }
  BlurSpec b;
  b.kind = BlurKind::custom;
  b.rows = rows;
  b.cols = cols;
  b.anchor_row = rows / 2;
  b.anchor_col = cols / 2;
  b.kernel = normalized(std::move(weights));
  return b;
}

std::vector<Complex> BlurSpec::eigenvalues(std::size_t height, std::size_t width) const {
  std::vector<Complex> plane(height * width, Complex{0.0, 0.0});
  for (std::size_t r = 0; r < rows; ++r) {
    // (r - anchor) mod height, without going negative.
    const std::size_t wr = (r + height * (anchor_row / height + 1) - anchor_row) % height;
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t wc = (c + width * (anchor_col / width + 1) - anchor_col) % width;
      plane[wr * width + wc] += at(r, c);
    }
  }
  Fft2d(height, width).forward(plane);
  return plane;
}

BlurSpec read_kernel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kernel file " + path.string());
  std::vector<double> weights;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream ss(t);
    std::string token;
    std::size_t n = 0;
    while (ss >> token) {
      weights.push_back(parse_real(token, path));
      ++n;
    }
    if (cols == 0) {
      cols = n;
    } else if (n != cols) {
      throw FormatError("ragged kernel rows in " + path.string());
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("empty kernel file " + path.string());
  return BlurSpec::custom(rows, cols, std::move(weights));
}

Decimation Decimation::uniform(std::size_t factor, std::size_t row_phase, std::size_t col_phase) {
  Decimation d{factor, factor, row_phase, col_phase};
  if (factor == 0 || row_phase >= factor || col_phase >= factor) {
    throw ParameterError("decimation factor must be >= 1 and phases < factor");
  }
  return d;
}

Decimation Decimation::block_mean(std::size_t factor) {
  if (factor == 0) throw ParameterError("decimation factor must be >= 1");
  // A centered uniform kernel of width s covers offsets [-(s/2), s-1-s/2],
  // so output sample p averages [p - (s-1-s/2), p + s/2].
  const std::size_t phase = factor - 1 - factor / 2;
  return uniform(factor, phase, phase);
}

void Decimation::validate(std::size_t height, std::size_t width) const {
  if (row_factor == 0 || col_factor == 0) {
    throw ParameterError("decimation factors must be >= 1");
  }
  if (row_phase >= row_factor || col_phase >= col_factor) {
    throw ParameterError("decimation phase must be smaller than the factor");
  }
  if (height % row_factor != 0 || width % col_factor != 0) {
    throw DimensionError("spatial dims " + std::to_string(height) + "x" + std::to_string(width) +
                         " not divisible by decimation " + std::to_string(row_factor) + "x" +
                         std::to_string(col_factor));
  }
}

Srf::Srf(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    throw ParameterError("SRF must have at least one row and column");
  }
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw ParameterError("SRF weights must be finite and nonnegative");
  }
  for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
    const double sum = weights_.row(r).sum();
    if (sum <= 0.0) {
      throw ParameterError("SRF row " + std::to_string(r) + " has zero sum");
    }
    weights_.row(r) /= sum;
  }
}

Srf Srf::identity(std::size_t bands) {
  return Srf(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(bands),
                                       static_cast<Eigen::Index>(bands)));
}

Srf Srf::synthetic_rgb(std::size_t bands) {
  if (bands == 0) throw ParameterError("SRF needs at least one band");
  // Peak positions and widths as fractions of the spectral range; roughly a
  // consumer camera over 400-700 nm.
  constexpr double centers[3] = {0.20, 0.45, 0.68};
  constexpr double widths[3] = {0.10, 0.11, 0.10};
  Eigen::MatrixXd w(3, static_cast<Eigen::Index>(bands));
  for (int r = 0; r < 3; ++r) {
    for (std::size_t k = 0; k < bands; ++k) {
      const double pos = bands == 1 ? 0.5 : static_cast<double>(k) / static_cast<double>(bands - 1);
      const double t = (pos - centers[r]) / widths[r];
      w(r, static_cast<Eigen::Index>(k)) = std::exp(-0.5 * t * t) + 1e-6;
    }
  }
  return Srf(std::move(w));
}

Srf read_srf_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open SRF file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty SRF file " + path.string());
  const auto header = split_csv(line);
  if (header.empty() || header.front() != "band_centers") {
    throw FormatError("SRF file must start with a 'band_centers' header: " + path.string());
  }
  const std::size_t declared = header.size() - 1;

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& f : split_csv(line)) row.push_back(parse_real(f, path));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError("ragged SRF rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError("SRF file has no weight rows: " + path.string());
  if (declared != 0 && declared != rows.front().size()) {
    throw FormatError("SRF header lists " + std::to_string(declared) + " band centers but rows hold " +
                      std::to_string(rows.front().size()) + " weights");
  }
  Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return Srf(std::move(w));
}

void write_srf_csv(const Srf& srf, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "band_centers";
  for (std::size_t c = 0; c < srf.cols(); ++c) out << ',' << c;
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < srf.rows(); ++r) {
    for (std::size_t c = 0; c < srf.cols(); ++c) {
      if (c != 0) out << ',';
      out << srf.weights()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

HyperCube scaled(const HyperCube& x, double a) {
  HyperCube out = x;
  if (a != 1.0) {
    for (double& v : out.data()) v *= a;
  }
  return out;
}

}  // namespace

HyperCube blur_apply(const HyperCube& x, const BlurSpec& blur) {
  if (x.empty()) throw DimensionError("blur_apply: empty cube");
  if (blur.rows == 1 && blur.cols == 1) return scaled(x, blur.kernel[0]);
  return apply_spectral_filter(x, blur.eigenvalues(x.height(), x.width()), false);
}

HyperCube blur_adjoint_apply(const HyperCube& x, const BlurSpec& blur) {
  if (x.empty()) throw DimensionError("blur_adjoint_apply: empty cube");
  if (blur.rows == 1 && blur.cols == 1) return scaled(x, blur.kernel[0]);
  return apply_spectral_filter(x, blur.eigenvalues(x.height(), x.width()), true);
}

HyperCube decimate(const HyperCube& x, const Decimation& dec) {
  dec.validate(x.height(), x.width());
  const std::size_t h = x.height() / dec.row_factor;
  const std::size_t w = x.width() / dec.col_factor;
  HyperCube out(x.bands(), h, w);
  for (std::size_t k = 0; k < x.bands(); ++k) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        out(k, i, j) = x(k, i * dec.row_factor + dec.row_phase, j * dec.col_factor + dec.col_phase);
      }
    }
  }
  return out;
}

HyperCube upsample_zero_fill(const HyperCube& y, const Decimation& dec) {
  if (y.empty()) throw DimensionError("upsample_zero_fill: empty cube");
  const std::size_t height = y.height() * dec.row_factor;
  const std::size_t width = y.width() * dec.col_factor;
  dec.validate(height, width);
  HyperCube out(y.bands(), height, width, 0.0);
  for (std::size_t k = 0; k < y.bands(); ++k) {
    for (std::size_t i = 0; i < y.height(); ++i) {
      for (std::size_t j = 0; j < y.width(); ++j) {
        out(k, i * dec.row_factor + dec.row_phase, j * dec.col_factor + dec.col_phase) = y(k, i, j);
      }
    }
  }
  return out;
}

HyperCube blur_decimate(const HyperCube& x, const BlurSpec& blur, const Decimation& dec) {
  dec.validate(x.height(), x.width());
  return decimate(blur_apply(x, blur), dec);
}

HyperCube blur_decimate_adjoint(const HyperCube& y, const BlurSpec& blur, const Decimation& dec) {
  return blur_adjoint_apply(upsample_zero_fill(y, dec), blur);
}

HyperCube srf_apply(const HyperCube& x, const Srf& srf) {
  if (x.bands() != srf.cols()) {
    throw DimensionError("srf_apply: cube has " + std::to_string(x.bands()) +
                         " bands, SRF expects " + std::to_string(srf.cols()));
  }
  HyperCube out(srf.rows(), x.height(), x.width(), 0.0);
  const auto& w = srf.weights();
  for (std::size_t i = 0; i < srf.rows(); ++i) {
    auto dst = out.band(i);
    for (std::size_t k = 0; k < srf.cols(); ++k) {
      const double wk = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (wk == 0.0) continue;
      const auto src = x.band(k);
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += wk * src[p];
    }
  }
  return out;
}

HyperCube srf_adjoint_apply(const HyperCube& z, const Srf& srf) {
  if (z.bands() != srf.rows()) {
    throw DimensionError("srf_adjoint_apply: cube has " + std::to_string(z.bands()) +
                         " bands, SRF has " + std::to_string(srf.rows()) + " rows");
  }
  HyperCube out(srf.cols(), z.height(), z.width(), 0.0);
  const auto& w = srf.weights();
  for (std::size_t k = 0; k < srf.cols(); ++k) {
    auto dst = out.band(k);
    for (std::size_t i = 0; i < srf.rows(); ++i) {
      const double wk = w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (wk == 0.0) continue;
      const auto src = z.band(i);
      for (std::size_t p = 0; p < dst.size(); ++p) dst[p] += wk * src[p];
    }
  }
  return out;
}

void add_noise_snr(HyperCube& x, double snr_db, std::mt19937_64& rng) {
  if (!std::isfinite(snr_db)) throw ParameterError("SNR must be finite");
  const double power = frobenius_sq(x) / static_cast<double>(x.size());
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& v : x.data()) v += noise(rng);
}

Observation simulate(const HyperCube& truth, const BlurSpec& blur, const Decimation& dec,
                     const Srf& srf, const SimulationOptions& options) {
  for (double v : truth.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValueError("simulate: ground truth must lie in [0,1]");
    }
  }
  Observation obs{blur_decimate(truth, blur, dec), srf_apply(truth, srf)};
  if (options.snr_db) {
    std::mt19937_64 rng(options.seed);
    add_noise_snr(obs.lr_hsi, *options.snr_db, rng);
    add_noise_snr(obs.hr_msi, *options.snr_db, rng);
  }
  return obs;
}

}  // namespace hsfuse::degradation
