#include "manifest.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hsfuse/errors.hpp"

namespace hsfuse::cli {

using nlohmann::json;

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  return path.parent_path() / (path.filename().string() + ".tmp");
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

}  // namespace

json to_json(const Manifest& m) {
  json blur = {
      {"kind", degradation::to_string(m.blur.kind)},
      {"rows", m.blur.rows},
      {"cols", m.blur.cols},
      {"anchor", {m.blur.anchor_row, m.blur.anchor_col}},
      {"kernel", m.blur.kernel},
  };
  if (m.blur_sigma) blur["sigma"] = *m.blur_sigma;

  json weights = json::array();
  for (Eigen::Index r = 0; r < m.srf.weights().rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.srf.weights().cols(); ++c) row.push_back(m.srf.weights()(r, c));
    weights.push_back(std::move(row));
  }

  return json{
      {"schema_version", kSchemaVersion},
      {"kind", "hsfuse.manifest"},
      {"truth_dims", {{"bands", m.bands}, {"height", m.height}, {"width", m.width}}},
      {"blur", std::move(blur)},
      {"decimation",
       {{"row_factor", m.dec.row_factor},
        {"col_factor", m.dec.col_factor},
        {"row_phase", m.dec.row_phase},
        {"col_phase", m.dec.col_phase}}},
      {"srf", {{"rows", m.srf.rows()}, {"cols", m.srf.cols()}, {"weights", std::move(weights)}}},
      {"noise", {{"snr_db", m.snr_db ? json(*m.snr_db) : json(nullptr)}, {"seed", m.seed}}},
      {"outputs", {{"lr_hsi", m.lr_file}, {"hr_msi", m.hr_file}}},
  };
}

Manifest manifest_from_json(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw FormatError("unsupported manifest schema version");
    }
    Manifest m;
    const auto& dims = j.at("truth_dims");
    m.bands = dims.at("bands").get<std::size_t>();
    m.height = dims.at("height").get<std::size_t>();
    m.width = dims.at("width").get<std::size_t>();

    const auto& b = j.at("blur");
    // Restored verbatim: re-normalizing could perturb the stored bits.
    m.blur.kind = degradation::blur_kind_from_string(b.at("kind").get<std::string>());
    m.blur.rows = b.at("rows").get<std::size_t>();
    m.blur.cols = b.at("cols").get<std::size_t>();
    m.blur.anchor_row = b.at("anchor").at(0).get<std::size_t>();
    m.blur.anchor_col = b.at("anchor").at(1).get<std::size_t>();
    m.blur.kernel = b.at("kernel").get<std::vector<double>>();
    if (m.blur.kernel.size() != m.blur.rows * m.blur.cols || m.blur.anchor_row >= m.blur.rows ||
        m.blur.anchor_col >= m.blur.cols) {
      throw FormatError("manifest blur kernel is inconsistent");
    }
    if (b.contains("sigma")) m.blur_sigma = b.at("sigma").get<double>();

    const auto& d = j.at("decimation");
    m.dec.row_factor = d.at("row_factor").get<std::size_t>();
    m.dec.col_factor = d.at("col_factor").get<std::size_t>();
    m.dec.row_phase = d.at("row_phase").get<std::size_t>();
    m.dec.col_phase = d.at("col_phase").get<std::size_t>();
    m.dec.validate(m.height, m.width);

    const auto rows = j.at("srf").at("weights").get<std::vector<std::vector<double>>>();
    if (rows.empty() || rows.front().empty()) throw FormatError("manifest SRF is empty");
    Eigen::MatrixXd w(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw FormatError("manifest SRF rows are ragged");
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
      }
    }
    m.srf = degradation::Srf(std::move(w));

    const auto& noise = j.at("noise");
    if (!noise.at("snr_db").is_null()) m.snr_db = noise.at("snr_db").get<double>();
    m.seed = noise.at("seed").get<std::uint64_t>();
    m.lr_file = j.at("outputs").at("lr_hsi").get<std::string>();
    m.hr_file = j.at("outputs").at("hr_msi").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
}

json to_json(const metrics::MetricReport& r) {
  return json{{"schema_version", kSchemaVersion},
              {"rmse", r.rmse},
              {"psnr", r.psnr},
              {"ergas", r.ergas},
              {"sam", r.sam},
              {"per_band_psnr", r.per_band_psnr}};
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  commit(tmp, path);
}

void write_cube_atomic(const HyperCube& cube, const std::filesystem::path& path) {
  const auto tmp = temp_sibling(path);
  cube_write(cube, tmp, DType::f64);
  const CubeHeader h = cube_read_header(tmp);
  if (h.bands != cube.bands() || h.height != cube.height() || h.width != cube.width() ||
      std::filesystem::file_size(tmp) != kCubeHeaderSize + h.payload_bytes()) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw IoError("validation of " + tmp.string() + " failed after writing");
  }
  commit(tmp, path);
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

std::string curve_csv(const regparam::ResponseCurve& curve, bool with_quality) {
  std::ostringstream out;
  out << "mu,j1,j2,distance" << (with_quality ? ",rmse,psnr" : "") << '\n';
  for (const auto& p : curve.points) {
    out << format_real(p.mu) << ',' << format_real(p.j1) << ',' << format_real(p.j2) << ','
        << format_real(p.distance);
    if (with_quality) {
      out << ',' << format_real(p.rmse.value_or(std::nan(""))) << ','
          << format_real(p.psnr.value_or(std::nan("")));
    }
    out << '\n';
  }
  return out.str();
}

std::string rmse_csv(const regparam::ResponseCurve& curve) {
  std::ostringstream out;
  out << "mu,rmse,psnr\n";
  for (const auto& p : curve.points) {
    out << format_real(p.mu) << ',' << format_real(p.rmse.value_or(std::nan(""))) << ','
        << format_real(p.psnr.value_or(std::nan(""))) << '\n';
  }
  return out.str();
}

std::string trace_csv(const regparam::MdcResult& result) {
  std::ostringstream out;
  out << "mu,j1,j2,distance\n";
  for (const auto& t : result.trace) {
    out << format_real(t.mu) << ',' << format_real(t.j1) << ',' << format_real(t.j2) << ','
        << format_real(t.distance) << '\n';
  }
  return out.str();
}

}  // namespace hsfuse::cli
