#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hsfuse/degradation.hpp"
#include "hsfuse/metrics.hpp"
#include "hsfuse/regparam.hpp"
#include "json.hpp"

namespace hsfuse::cli {

inline constexpr int kSchemaVersion = 1;

// Degradation record written by `simulate` and read by `fuse`/`sweep`, so
// the fusion step never re-derives B, S or R.
struct Manifest {
  std::size_t bands = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  degradation::BlurSpec blur;
  std::optional<double> blur_sigma;
  degradation::Decimation dec;
  degradation::Srf srf = degradation::Srf::identity(1);
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  std::string lr_file = "Y.hsc";
  std::string hr_file = "Z.hsc";
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
Manifest read_manifest(const std::filesystem::path& path);

nlohmann::json to_json(const metrics::MetricReport& r);

// Writes `text` to a sibling temp file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
// Same for cubes; the written file is re-read and checked before the rename.
void write_cube_atomic(const HyperCube& cube, const std::filesystem::path& path);

// Shortest round-trip decimal form; "nan" for NaN.
std::string format_real(double v);

std::string curve_csv(const regparam::ResponseCurve& curve, bool with_quality);
std::string rmse_csv(const regparam::ResponseCurve& curve);
std::string trace_csv(const regparam::MdcResult& result);

}  // namespace hsfuse::cli
