#include "hsfuse/regparam.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "hsfuse/errors.hpp"
#include "hsfuse/metrics.hpp"

namespace hsfuse::regparam {

void MdcConfig::validate() const {
  if (!(a > 0.0) || !(a < b_upper) || !std::isfinite(b_upper)) {
    throw ParameterError("MDC interval must satisfy 0 < a < b");
  }
  const double span = space == SearchSpace::log10 ? std::log10(b_upper) - std::log10(a) : b_upper - a;
  if (!(epsilon > 0.0) || !(epsilon < span)) {
    throw ParameterError("MDC epsilon must satisfy 0 < epsilon < interval length");
  }
  if (!(delta > 0.5 && delta < 1.0)) {
    throw ParameterError("golden-section ratio must lie in (0.5, 1)");
  }
}

double compute_alpha(std::size_t srf_bands, std::size_t hsi_bands, double s_perdim) {
  if (hsi_bands == 0 || !(s_perdim > 0.0)) {
    throw ParameterError("compute_alpha: zero band count or scale factor");
  }
  if (srf_bands > hsi_bands || s_perdim < 1.0) {
    throw ParameterError("compute_alpha requires b <= B and s >= 1");
  }
  const double ratio = static_cast<double>(srf_bands) / static_cast<double>(hsi_bands);
  const double inv_area = 1.0 / (s_perdim * s_perdim);
  return ratio * ratio + inv_area * inv_area;
}

double compute_alpha(const sylvester::FusionProblem& problem) {
  const double s = std::sqrt(static_cast<double>(problem.dec.total()));
  return compute_alpha(problem.srf.rows(), problem.srf.cols(), s);
}

IdealPoint ideal_point(const sylvester::FusionSolver& solver, const MdcConfig& cfg) {
  cfg.validate();
  HyperCube x;
  try {
    x = solver.solve(cfg.a);
  } catch (const Error& e) {
    throw SolveAtMuError(cfg.a, e.what());
  }
  return IdealPoint{sylvester::objective_terms(solver.problem(), x).j1, 0.0};
}

IdealPoint ideal_point(const sylvester::FusionProblem& problem, const MdcConfig& cfg) {
  return ideal_point(sylvester::FusionSolver(problem), cfg);
}

double mdc_distance(double j1, double j2, const IdealPoint& ideal, double alpha) {
  const double d1 = j1 - ideal.i1;
  const double d2 = j2 - ideal.i2;
  return d1 * d1 + alpha * d2 * d2;
}

MdcResult golden_section_mdc(const TermsFn& terms, const IdealPoint& ideal, double alpha,
                             const MdcConfig& cfg) {
  cfg.validate();
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");

  const bool log_space = cfg.space == SearchSpace::log10;
  const auto to_mu = [&](double t) { return log_space ? std::pow(10.0, t) : t; };

  MdcResult result;
  result.alpha = alpha;
  result.ideal = ideal;
  std::map<double, double> cache;
  const auto distance_at = [&](double t) {
    const double mu = to_mu(t);
    if (auto it = cache.find(mu); it != cache.end()) return it->second;
    const auto jt = terms(mu);
    const double d = mdc_distance(jt.j1, jt.j2, ideal, alpha);
    cache.emplace(mu, d);
    result.trace.push_back(TraceEntry{mu, jt.j1, jt.j2, d});
    return d;
  };

  double lo = log_space ? std::log10(cfg.a) : cfg.a;
  double hi = log_space ? std::log10(cfg.b_upper) : cfg.b_upper;
  double x_low = hi - cfg.delta * (hi - lo);
  double x_high = lo + cfg.delta * (hi - lo);
  double f_low = distance_at(x_low);
  double f_high = distance_at(x_high);
  while (hi - lo >= cfg.epsilon) {
    if (f_low < f_high) {
      hi = x_high;
      x_high = x_low;
      f_high = f_low;
      x_low = hi - cfg.delta * (hi - lo);
      f_low = distance_at(x_low);
    } else {
      lo = x_low;
      x_low = x_high;
      f_low = f_high;
      x_high = lo + cfg.delta * (hi - lo);
      f_high = distance_at(x_high);
    }
    ++result.iterations;
  }

  result.bracket_lo = to_mu(lo);
  result.bracket_hi = to_mu(hi);
  result.argmin_estimate = to_mu(0.5 * (lo + hi));
  result.mu_star = cfg.apply_alpha_to_result ? alpha * result.argmin_estimate : result.argmin_estimate;
  return result;
}

MdcResult estimate_mu(const sylvester::FusionSolver& solver, const MdcConfig& cfg) {
  const IdealPoint ideal = ideal_point(solver, cfg);
  const double alpha = compute_alpha(solver.problem());
  const TermsFn terms = [&](double mu) {
    try {
      return sylvester::objective_terms(solver.problem(), solver.solve(mu));
    } catch (const SolveAtMuError&) {
      throw;
    } catch (const Error& e) {
      throw SolveAtMuError(mu, e.what());
    }
  };
  return golden_section_mdc(terms, ideal, alpha, cfg);
}

MdcResult estimate_mu(const sylvester::FusionProblem& problem, const MdcConfig& cfg) {
  return estimate_mu(sylvester::FusionSolver(problem), cfg);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (n == 0 || !(lo > 0.0) || !(hi >= lo)) {
    throw ParameterError("log grid needs n >= 1 and 0 < lo <= hi");
  }
  if (n == 1) return {lo};
  if (!(hi > lo)) throw ParameterError("log grid with n > 1 needs lo < hi");
  std::vector<double> grid(n);
  const double l0 = std::log10(lo);
  const double step = (std::log10(hi) - l0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = std::pow(10.0, l0 + step * static_cast<double>(i));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

ResponseCurve sweep_response_curve(const sylvester::FusionSolver& solver,
                                   const std::vector<double>& mu_grid,
                                   const SweepOptions& options) {
  for (std::size_t i = 0; i < mu_grid.size(); ++i) {
    if (!(mu_grid[i] > 0.0) || (i > 0 && !(mu_grid[i] > mu_grid[i - 1]))) {
      throw ParameterError("mu grid must be positive and strictly increasing");
    }
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  ResponseCurve curve;
  curve.points.reserve(mu_grid.size());
  for (double mu : mu_grid) {
    CurvePoint pt;
    pt.mu = mu;
    try {
      const HyperCube x = solver.solve(mu);
      const auto t = sylvester::objective_terms(solver.problem(), x);
      pt.j1 = t.j1;
      pt.j2 = t.j2;
      pt.distance = mdc_distance(t.j1, t.j2, options.ideal, options.alpha);
      if (options.truth != nullptr) {
        pt.rmse = metrics::rmse(*options.truth, x);
        pt.psnr = metrics::psnr(*options.truth, x);
      }
    } catch (const Error& e) {
      pt.ok = false;
      pt.error = e.what();
      pt.j1 = pt.j2 = pt.distance = nan;
    }
    curve.points.push_back(std::move(pt));
  }
  return curve;
}

}  // namespace hsfuse::regparam
