#include "commands.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "hsfuse/degradation.hpp"
#include "hsfuse/errors.hpp"
#include "hsfuse/metrics.hpp"
#include "hsfuse/parallel.hpp"
#include "hsfuse/priors.hpp"
#include "hsfuse/sylvester.hpp"
#include "manifest.hpp"

namespace hsfuse::cli {

namespace fs = std::filesystem;
namespace dg = hsfuse::degradation;
using nlohmann::json;

namespace {

void setup_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("hsfuse");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("HSFUSE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(lvl));
  }
}

template <typename Fn>
int guarded(const char* name, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", name, e.what());
    return 1;
  }
}

void require_file(const fs::path& p, const char* flag) {
  if (p.empty()) throw ParameterError(std::string(flag) + " is required");
  if (!fs::is_regular_file(p)) throw IoError(std::string(flag) + ": no such file " + p.string());
}

void prepare_out_dir(const fs::path& dir) {
  if (dir.empty()) throw ParameterError("--out is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

dg::BlurSpec make_blur(const RunConfig& cfg, std::optional<double>& sigma_out) {
  if (cfg.blur == "uniform") return dg::BlurSpec::uniform(cfg.blur_size.value_or(cfg.scale));
  if (cfg.blur == "gaussian") {
    sigma_out = cfg.sigma;
    return dg::BlurSpec::gaussian(cfg.blur_size.value_or(8), cfg.sigma);
  }
  if (cfg.blur == "delta") return dg::BlurSpec::delta();
  if (cfg.blur.starts_with("file:")) return dg::read_kernel_file(cfg.blur.substr(5));
  throw ParameterError("--blur must be uniform, gaussian, delta or file:PATH");
}

dg::Srf make_srf(const std::string& spec, std::size_t bands) {
  if (spec == "rgb") return dg::Srf::synthetic_rgb(bands);
  if (spec == "identity") return dg::Srf::identity(bands);
  dg::Srf srf = dg::read_srf_csv(spec);
  if (srf.cols() != bands) {
    throw DimensionError("SRF " + spec + " has " + std::to_string(srf.cols()) +
                         " columns but the cube has " + std::to_string(bands) + " bands");
  }
  return srf;
}

struct LoadedProblem {
  Manifest manifest;
  sylvester::FusionProblem problem;
};

LoadedProblem load_problem(const RunConfig& cfg) {
  require_file(cfg.lr, "--lr");
  require_file(cfg.hr_rgb, "--hr-rgb");
  const fs::path manifest_path =
      cfg.manifest.empty() ? cfg.lr.parent_path() / "manifest.json" : cfg.manifest;
  require_file(manifest_path, "--manifest");

  LoadedProblem lp;
  lp.manifest = read_manifest(manifest_path);
  auto& p = lp.problem;
  p.lr_hsi = cube_read(cfg.lr);
  p.hr_msi = cube_read(cfg.hr_rgb);
  p.blur = lp.manifest.blur;
  p.dec = lp.manifest.dec;
  p.srf = lp.manifest.srf;
  p.prior = priors::make_prior(priors::PriorSource::parse(cfg.prior), p.lr_hsi, p.dec);
  p.validate();
  spdlog::info("problem: {} bands at {}x{}, {} MSI bands, decimation {}x{}", p.bands(), p.height(),
               p.width(), p.hr_msi.bands(), p.dec.row_factor, p.dec.col_factor);
  return lp;
}

json mdc_config_json(const regparam::MdcConfig& c) {
  return json{{"a", c.a},
              {"b", c.b_upper},
              {"epsilon", c.epsilon},
              {"delta", c.delta},
              {"apply_alpha_to_result", c.apply_alpha_to_result},
              {"search_space", c.space == regparam::SearchSpace::log10 ? "log10" : "linear"}};
}

}  // namespace

int cmd_simulate(const RunConfig& cfg) {
  return guarded("simulate", [&] {
    require_file(cfg.truth, "--truth");
    const HyperCube truth = cube_read(cfg.truth);

    Manifest m;
    m.bands = truth.bands();
    m.height = truth.height();
    m.width = truth.width();
    m.blur = make_blur(cfg, m.blur_sigma);
    if (cfg.phase) {
      m.dec = dg::Decimation::uniform(cfg.scale, cfg.phase->first, cfg.phase->second);
    } else if (m.blur.kind == dg::BlurKind::uniform) {
      m.dec = dg::Decimation::block_mean(cfg.scale);
    } else {
      m.dec = dg::Decimation::uniform(cfg.scale);
    }
    m.srf = make_srf(cfg.srf, truth.bands());
    m.snr_db = cfg.snr_db;
    m.seed = cfg.seed;

    const auto obs = dg::simulate(truth, m.blur, m.dec, m.srf, {cfg.snr_db, cfg.seed});
    prepare_out_dir(cfg.out);
    write_cube_atomic(obs.lr_hsi, cfg.out / m.lr_file);
    write_cube_atomic(obs.hr_msi, cfg.out / m.hr_file);
    write_text_atomic(cfg.out / "manifest.json", to_json(m).dump(2) + "\n");
    spdlog::info("simulate: wrote Y {}x{}x{} and Z {}x{}x{}", obs.lr_hsi.bands(),
                 obs.lr_hsi.height(), obs.lr_hsi.width(), obs.hr_msi.bands(),
                 obs.hr_msi.height(), obs.hr_msi.width());
  });
}

int cmd_fuse(const RunConfig& cfg) {
  return guarded("fuse", [&] {
    const auto start = std::chrono::steady_clock::now();
    const LoadedProblem lp = load_problem(cfg);
    prepare_out_dir(cfg.out);
    const sylvester::FusionSolver solver(lp.problem);

    json report{{"schema_version", kSchemaVersion}, {"kind", "hsfuse.fusion_report"},
                {"prior", cfg.prior}};
    double mu = 0.0;
    std::optional<regparam::MdcResult> mdc;
    if (cfg.fixed_mu) {
      mu = *cfg.fixed_mu;
      report["mu_mode"] = "fixed";
    } else {
      try {
        mdc = regparam::estimate_mu(solver, cfg.mdc);
      } catch (const SolveAtMuError& e) {
        throw Error(std::string("MDC search aborted: ") + e.what());
      }
      mu = mdc->mu_star;
      report["mu_mode"] = "mdc";
      report["mdc"] = {{"config", mdc_config_json(cfg.mdc)},
                       {"alpha", mdc->alpha},
                       {"ideal", {{"i1", mdc->ideal.i1}, {"i2", mdc->ideal.i2}}},
                       {"bracket", {mdc->bracket_lo, mdc->bracket_hi}},
                       {"argmin_estimate", mdc->argmin_estimate},
                       {"iterations", mdc->iterations},
                       {"evaluations", mdc->trace.size()}};
      spdlog::info("fuse: MDC mu* = {} after {} evaluations", mu, mdc->trace.size());
    }

    const HyperCube x = solver.solve(mu);
    const auto terms = sylvester::objective_terms(lp.problem, x);
    report["mu"] = mu;
    report["j1"] = terms.j1;
    report["j2"] = terms.j2;
    report["objective"] = terms.j1 + mu * terms.j2;
    report["sylvester_residual"] = sylvester::sylvester_residual(lp.problem, mu, x);
    report["output"] = "X_hat.hsc";
    report["dims"] = {{"bands", x.bands()}, {"height", x.height()}, {"width", x.width()}};

    write_cube_atomic(x, cfg.out / "X_hat.hsc");
    if (mdc) write_text_atomic(cfg.out / "trace.csv", trace_csv(*mdc));
    write_text_atomic(cfg.out / "report.json", report.dump(2) + "\n");
    // Wall time goes to a sidecar so the report stays byte-reproducible.
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_text_atomic(cfg.out / "timing.json",
                      json{{"schema_version", kSchemaVersion}, {"wall_time_s", secs}}.dump(2) + "\n");
  });
}

int cmd_sweep(const RunConfig& cfg) {
  return guarded("sweep", [&] {
    const LoadedProblem lp = load_problem(cfg);
    std::optional<HyperCube> truth;
    if (!cfg.truth.empty()) {
      require_file(cfg.truth, "--truth");
      truth = cube_read(cfg.truth);
      if (!truth->same_shape(lp.problem.prior)) {
        throw DimensionError("--truth does not match the HR HSI dims");
      }
    }
    prepare_out_dir(cfg.out);
    const sylvester::FusionSolver solver(lp.problem);
    const auto grid = regparam::log_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_n);

    regparam::SweepOptions opts;
    opts.ideal = regparam::ideal_point(solver, cfg.mdc);
    opts.alpha = regparam::compute_alpha(lp.problem);
    opts.truth = truth ? &*truth : nullptr;
    const auto curve = regparam::sweep_response_curve(solver, grid, opts);

    std::size_t failed = 0;
    for (const auto& p : curve.points) {
      if (!p.ok) {
        ++failed;
        spdlog::warn("sweep: mu={} failed: {}", p.mu, p.error);
      }
    }
    write_text_atomic(cfg.out / "curve.csv", curve_csv(curve, truth.has_value()));
    if (truth) write_text_atomic(cfg.out / "rmse.csv", rmse_csv(curve));
    if (failed != 0) {
      throw Error(std::to_string(failed) + " of " + std::to_string(curve.points.size()) +
                  " sweep points failed (rows hold nan)");
    }
  });
}

int cmd_eval(const RunConfig& cfg) {
  return guarded("eval", [&] {
    require_file(cfg.truth, "--truth");
    require_file(cfg.est, "--est");
    if (!cfg.eval_scale) throw ParameterError("--scale is required for eval (ERGAS ratio)");
    const HyperCube truth = cube_read(cfg.truth);
    const HyperCube est = cube_read(cfg.est);
    const auto report = metrics::evaluate(truth, est, *cfg.eval_scale);
    const std::string text = to_json(report).dump(2) + "\n";
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      write_text_atomic(cfg.out, text);
    }
  });
}

int run_cli(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Hyperspectral/multispectral image fusion toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string mu_text = "mdc";
  std::string phase_text;
  bool no_alpha = false;
  bool mdc_log = false;

  app.add_option("--threads", cfg.threads, "Worker thread cap")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Degrade a ground-truth cube into (Y, Z)");
  sim->add_option("--truth", cfg.truth, "Ground-truth HR HSI (.hsc)")->required();
  sim->add_option("--out", cfg.out, "Output directory")->required();
  sim->add_option("--blur", cfg.blur, "uniform | gaussian | delta | file:PATH");
  sim->add_option("--blur-size", cfg.blur_size, "Kernel size (uniform: defaults to --scale; gaussian: 8)");
  sim->add_option("--sigma", cfg.sigma, "Gaussian kernel standard deviation");
  sim->add_option("--scale", cfg.scale, "Per-dimension decimation factor")->check(CLI::PositiveNumber);
  sim->add_option("--phase", phase_text, "Decimation phase ROW,COL");
  sim->add_option("--srf", cfg.srf, "rgb | identity | SRF CSV path");
  sim->add_option("--snr", cfg.snr_db, "Add Gaussian noise at this SNR (dB)");
  sim->add_option("--seed", cfg.seed, "Noise seed");

  auto add_problem_opts = [&](CLI::App* sc) {
    sc->add_option("--lr", cfg.lr, "LR HSI (.hsc)")->required();
    sc->add_option("--hr-rgb", cfg.hr_rgb, "HR conventional image (.hsc)")->required();
    sc->add_option("--manifest", cfg.manifest, "Degradation manifest (default: next to --lr)");
    sc->add_option("--prior", cfg.prior, "bicubic | file:PATH");
    sc->add_option("--out", cfg.out, "Output directory")->required();
    sc->add_option("--mdc-a", cfg.mdc.a, "MDC lower mu bound");
  };

  auto* fuse = app.add_subcommand("fuse", "Fuse (Y, Z) into an HR HSI");
  add_problem_opts(fuse);
  fuse->add_option("--mu", mu_text, "mdc | fixed value");
  fuse->add_option("--mdc-b", cfg.mdc.b_upper, "MDC upper mu bound");
  fuse->add_option("--mdc-eps", cfg.mdc.epsilon, "MDC final bracket length");
  fuse->add_flag("--no-alpha-result", no_alpha, "Do not scale the bracket midpoint by alpha");
  fuse->add_flag("--mdc-log", mdc_log, "Golden-section search in log10(mu)");

  auto* sweep = app.add_subcommand("sweep", "Sample the response curve over a log grid");
  add_problem_opts(sweep);
  sweep->add_option("--truth", cfg.truth, "Ground truth for per-mu RMSE/PSNR");
  sweep->add_option("--grid-lo", cfg.grid_lo, "Smallest mu");
  sweep->add_option("--grid-hi", cfg.grid_hi, "Largest mu");
  sweep->add_option("--grid-n", cfg.grid_n, "Number of grid points")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "RMSE/PSNR/ERGAS/SAM of an estimate");
  eval->add_option("--truth", cfg.truth, "Ground-truth cube")->required();
  eval->add_option("--est", cfg.est, "Estimated cube")->required();
  eval->add_option("--scale", cfg.eval_scale, "Per-dimension scale factor for ERGAS")->required();
  eval->add_option("--out", cfg.out, "Metric report JSON (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  set_max_threads(cfg.threads);
  cfg.mdc.apply_alpha_to_result = !no_alpha;
  cfg.mdc.space = mdc_log ? regparam::SearchSpace::log10 : regparam::SearchSpace::linear;
  if (mu_text != "mdc") {
    try {
      std::size_t used = 0;
      cfg.fixed_mu = std::stod(mu_text, &used);
      if (used != mu_text.size()) throw std::invalid_argument(mu_text);
    } catch (const std::exception&) {
      spdlog::error("--mu must be 'mdc' or a number, got '{}'", mu_text);
      return 2;
    }
  }
  if (!phase_text.empty()) {
    const auto comma = phase_text.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(phase_text);
      cfg.phase = std::pair{static_cast<std::size_t>(std::stoul(phase_text.substr(0, comma))),
                            static_cast<std::size_t>(std::stoul(phase_text.substr(comma + 1)))};
    } catch (const std::exception&) {
      spdlog::error("--phase must be ROW,COL, got '{}'", phase_text);
      return 2;
    }
  }

  if (*sim) return cmd_simulate(cfg);
  if (*fuse) return cmd_fuse(cfg);
  if (*sweep) return cmd_sweep(cfg);
  return cmd_eval(cfg);
}

}  // namespace hsfuse::cli
