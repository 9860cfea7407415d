#include "doctest.h"

#include <cmath>

#include "hsfuse/errors.hpp"
#include "hsfuse/metrics.hpp"
#include "hsfuse/priors.hpp"
#include "hsfuse/sylvester.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace hsfuse;
using namespace hsfuse::priors;
using hsfuse::testing::max_abs_diff;
using hsfuse::testing::random_cube;

namespace {

double catmull_rom(double x) {
  x = std::abs(x);
  if (x < 1.0) return 1.5 * x * x * x - 2.5 * x * x + 1.0;
  if (x < 2.0) return -0.5 * x * x * x + 2.5 * x * x - 4.0 * x + 2.0;
  return 0.0;
}

// Direct 2-D evaluation, 16 taps per output pixel.
HyperCube reference_upsample(const HyperCube& y, std::size_t sr, std::size_t sc) {
  HyperCube out(y.bands(), y.height() * sr, y.width() * sc, 0.0);
  const long h = static_cast<long>(y.height());
  const long w = static_cast<long>(y.width());
  for (std::size_t k = 0; k < y.bands(); ++k)
    for (std::size_t i = 0; i < out.height(); ++i)
      for (std::size_t j = 0; j < out.width(); ++j) {
        const double r = (static_cast<double>(i) + 0.5) / static_cast<double>(sr) - 0.5;
        const double c = (static_cast<double>(j) + 0.5) / static_cast<double>(sc) - 0.5;
        const long r0 = static_cast<long>(std::floor(r));
        const long c0 = static_cast<long>(std::floor(c));
        double acc = 0.0;
        for (long m = r0 - 1; m <= r0 + 2; ++m)
          for (long n = c0 - 1; n <= c0 + 2; ++n) {
            const auto mi = static_cast<std::size_t>(std::clamp(m, 0L, h - 1));
            const auto ni = static_cast<std::size_t>(std::clamp(n, 0L, w - 1));
            acc += catmull_rom(r - static_cast<double>(m)) * catmull_rom(c - static_cast<double>(n)) * y(k, mi, ni);
          }
        out(k, i, j) = acc;
      }
  return out;
}

HyperCube nearest_upsample(const HyperCube& y, std::size_t s) {
  HyperCube out(y.bands(), y.height() * s, y.width() * s);
  for (std::size_t k = 0; k < y.bands(); ++k)
    for (std::size_t i = 0; i < out.height(); ++i)
      for (std::size_t j = 0; j < out.width(); ++j) out(k, i, j) = y(k, i / s, j / s);
  return out;
}

}  // namespace

TEST_CASE("cubic_weight") {
  CHECK(cubic_weight(0.0) == 1.0);
  CHECK(cubic_weight(1.0) == 0.0);
  CHECK(cubic_weight(2.0) == 0.0);
  CHECK(cubic_weight(3.5) == 0.0);
  CHECK(cubic_weight(0.5) == doctest::Approx(0.5625));
  CHECK(cubic_weight(-1.5) == doctest::Approx(-0.0625));
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.9}) {
    const double sum = cubic_weight(t + 1) + cubic_weight(t) + cubic_weight(1 - t) + cubic_weight(2 - t);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("bicubic_upsample") {
  std::mt19937_64 rng(1);

  SUBCASE("constant band stays constant") {
    const auto up = bicubic_upsample(cube_new(2, 3, 5, 0.42), 4, 2);
    CHECK(up.height() == 12);
    CHECK(up.width() == 10);
    for (double v : up.data()) CHECK(v == doctest::Approx(0.42).epsilon(1e-15));
  }
  SUBCASE("factor 1 is the identity") {
    const auto y = random_cube(3, 5, 4, rng);
    CHECK(max_abs_diff(bicubic_upsample(y, 1, 1), y) < 1e-15);
  }
  SUBCASE("8x8 band at s=4 matches the direct 2-D reference") {
    const auto y = random_cube(1, 8, 8, rng);
    CHECK(max_abs_diff(bicubic_upsample(y, 4, 4), reference_upsample(y, 4, 4)) <= 1e-10);
  }
  SUBCASE("unequal factors and tiny images") {
    const auto y = random_cube(2, 3, 2, rng);
    CHECK(max_abs_diff(bicubic_upsample(y, 3, 5), reference_upsample(y, 3, 5)) <= 1e-10);
    const auto one = random_cube(1, 1, 1, rng);
    CHECK(max_abs_diff(bicubic_upsample(one, 2, 2), cube_new(1, 2, 2, one.data()[0])) < 1e-15);
  }
  SUBCASE("linearity") {
    const auto a = random_cube(2, 6, 6, rng);
    const auto b = random_cube(2, 6, 6, rng);
    const auto lhs = bicubic_upsample(axpy(-0.7, a, b), 2, 2);
    const auto rhs = axpy(-0.7, bicubic_upsample(a, 2, 2), bicubic_upsample(b, 2, 2));
    CHECK(max_abs_diff(lhs, rhs) < 1e-14);
  }
  SUBCASE("beats nearest neighbour on smooth scenes") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto truth = testing::smooth_cube(4, 64, 64, seed);
      const auto y = degradation::blur_decimate(truth, degradation::BlurSpec::uniform(4),
                                                degradation::Decimation::block_mean(4));
      CHECK(metrics::rmse(truth, bicubic_upsample(y, 4, 4)) < metrics::rmse(truth, nearest_upsample(y, 4)));
    }
  }
  SUBCASE("zero factor") {
    CHECK_THROWS_AS(bicubic_upsample(random_cube(1, 2, 2, rng), 0, 2), ParameterError);
  }
}

TEST_CASE("PriorSource::parse") {
  CHECK(PriorSource::parse("bicubic").kind == PriorKind::bicubic);
  const auto ext = PriorSource::parse("file:/tmp/p.hsc");
  CHECK(ext.kind == PriorKind::external);
  CHECK(ext.path == "/tmp/p.hsc");
  CHECK_THROWS_AS(PriorSource::parse("tsfn"), ParameterError);
  CHECK_THROWS_AS(PriorSource::parse("file:"), ParameterError);
}

TEST_CASE("make_prior") {
  std::mt19937_64 rng(2);
  testing::TempDir dir;
  const auto y = random_cube(3, 8, 8, rng);
  const auto dec = degradation::Decimation::uniform(2);

  SUBCASE("bicubic shape") {
    const auto p = make_prior(PriorSource{}, y, dec);
    CHECK(p.bands() == 3);
    CHECK(p.height() == 16);
    CHECK(p.width() == 16);
  }
  SUBCASE("external shape checks") {
    cube_write(random_cube(3, 16, 16, rng), dir / "ok.hsc");
    cube_write(random_cube(4, 16, 16, rng), dir / "bands.hsc");
    cube_write(random_cube(3, 16, 8, rng), dir / "dims.hsc");
    CHECK(make_prior(PriorSource::parse("file:" + (dir / "ok.hsc").string()), y, dec).bands() == 3);
    CHECK_THROWS_AS(make_prior(PriorSource::parse("file:" + (dir / "bands.hsc").string()), y, dec),
                    PriorShapeError);
    CHECK_THROWS_AS(make_prior(PriorSource::parse("file:" + (dir / "dims.hsc").string()), y, dec),
                    PriorShapeError);
    CHECK_THROWS_AS(make_prior(PriorSource::parse("file:" + (dir / "missing.hsc").string()), y, dec),
                    IoError);
  }
  SUBCASE("external prior equal to the truth is reproduced by the solver") {
    const auto truth = random_cube(4, 16, 16, rng);
    sylvester::FusionProblem p;
    p.blur = degradation::BlurSpec::gaussian(5, 1.0);
    p.dec = degradation::Decimation::uniform(4);
    p.srf = degradation::Srf::synthetic_rgb(4);
    const auto obs = degradation::simulate(truth, p.blur, p.dec, p.srf);
    p.lr_hsi = obs.lr_hsi;
    p.hr_msi = obs.hr_msi;
    cube_write(truth, dir / "truth.hsc");
    p.prior = make_prior(PriorSource::parse("file:" + (dir / "truth.hsc").string()), p.lr_hsi, p.dec);
    for (double mu : {1e-4, 0.1}) CHECK(testing::rel_diff(sylvester::solve_fuse(p, mu), truth) <= 1e-6);
  }
}
