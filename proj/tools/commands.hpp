#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>

#include "hsfuse/regparam.hpp"

namespace hsfuse::cli {

enum class Subcommand { simulate, fuse, sweep, eval };

struct RunConfig {
  Subcommand subcommand = Subcommand::simulate;

  std::filesystem::path truth;
  std::filesystem::path lr;
  std::filesystem::path hr_rgb;
  std::filesystem::path est;
  std::filesystem::path manifest;  // defaults to manifest.json next to --lr
  std::filesystem::path out;

  // simulate
  std::string blur = "uniform";  // uniform | gaussian | delta | file:PATH
  std::optional<std::size_t> blur_size;
  double sigma = 3.0;
  std::size_t scale = 8;
  std::optional<std::pair<std::size_t, std::size_t>> phase;
  std::string srf = "rgb";  // rgb | identity | CSV path
  std::optional<double> snr_db;

  // fuse / sweep
  std::string prior = "bicubic";
  std::optional<double> fixed_mu;  // empty means MDC
  regparam::MdcConfig mdc;
  double grid_lo = 1e-6;
  double grid_hi = 1.0;
  std::size_t grid_n = 50;

  // eval
  std::optional<double> eval_scale;

  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

// Each command returns 0 only when every declared output was written and
// validated; errors are logged and reported as exit status 1.
int cmd_simulate(const RunConfig& cfg);
int cmd_fuse(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace hsfuse::cli
