#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cfts/noise_bench.hpp"
#include "test_support.hpp"

using namespace cfts;
using namespace cfts::bench;
using cfts::testing::kRadPerFs;

namespace {

std::string report_text(const BenchReport& r) {
  std::ostringstream s;
  write_report(s, r);
  return s.str();
}

double total(const Array2D<double>& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return s;
}

}  // namespace

TEST_CASE("noise-free scanning recovers the pixel averages") {
  const JointSpectrum s = cfts::testing::multiplex_source();
  BenchSpec b = cfts::testing::multiplex_bench(16);
  b.dark_coinc_rate = 0.0;
  const Array2D<double> truth = pixel_truth(s, b);
  const Estimate e = scanning_baseline(s, b, 0, false);
  for (std::size_t k = 0; k < truth.size(); ++k)
    CHECK(e.value[k] == doctest::Approx(truth[k]).epsilon(1e-12).scale(1e-300));
  CHECK(total(truth) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(e.time_used == doctest::Approx(b.total_time).epsilon(1e-12));
}

TEST_CASE("scanning variance of a flat spectrum") {
  const double w0 = 2.4 * kRadPerFs, bw = 0.64 * kRadPerFs;
  JointSpectrum flat{{UniformAxis::spanning(w0 - bw / 2, w0 + bw / 2, 65),
                      UniformAxis::spanning(w0 - bw / 2, w0 + bw / 2, 65),
                      SpectralQuantity::AngularFrequency},
                     Array2D<double>(65, 65, 1.0)};
  BenchSpec b;
  b.band = {w0, w0, bw, bw};
  b.pixels_a = b.pixels_b = 64;
  b.dark_coinc_rate = 1000.0;
  b.pair_rate_scale = 100.0 * 64 * 64 * 1.0;  // about 100 pairs/s per pixel
  b.total_time = 10.0 * 64 * 64;              // 10 s per pixel
  const Array2D<double> truth = pixel_truth(flat, b);
  const Estimate e = scanning_baseline(flat, b, 3, true);
  const double t_pix = 10.0;
  double mean = 0.0, var = 0.0, p = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    mean += e.value[k] * b.pair_rate_scale / truth.size();
    p += truth[k] / truth.size();
  }
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = e.value[k] * b.pair_rate_scale - mean;
    var += d * d / (truth.size() - 1);
  }
  const double signal = b.pair_rate_scale * p;
  // The 65-node grid integrates over 65 cells, the band covers 64.
  CHECK(signal == doctest::Approx(100.0 * (64.0 / 65) * (64.0 / 65)).epsilon(1e-9));
  CHECK(var == doctest::Approx((signal + b.dark_coinc_rate) / t_pix).epsilon(0.07));
  CHECK(mean == doctest::Approx(signal).epsilon(0.01));
}

TEST_CASE("noise-free Fourier estimate on a matched lattice") {
  const JointSpectrum s = cfts::testing::matched_gaussian();
  const double h = cfts::testing::kMatchedSpacing;
  const double w0 = omega_from_wavelength(nanometers(780));
  interf::PlanOptions options;
  options.oversampling = 1.5;
  options.matched_spacing = h;
  options.n_u = 512;
  options.n_v = 64;
  BenchSpec b;
  b.mesh = interf::plan_scan(
      interf::SpectralBand{w0, w0, 0.6 * kRadPerFs, 0.6 * kRadPerFs}, options);
  // One pixel per lattice node, nodes 56..71.
  const double centre = s.grid.a.start + 63.5 * h;
  b.band = {centre, centre, 16 * h, 16 * h};
  b.pixels_a = b.pixels_b = 16;
  b.supersample = 1;
  b.dark_coinc_rate = 0.0;
  const Estimate e = fourier_run(s, b, 0, false);
  Array2D<double> nodes(16, 16);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) nodes(i, j) = s.intensity(56 + i, 56 + j);
  double emax = 0.0, nmax = 0.0, num = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    emax = std::max(emax, e.value[k]);
    nmax = std::max(nmax, nodes[k]);
  }
  for (std::size_t k = 0; k < nodes.size(); ++k)
    num += std::pow(e.value[k] / emax - nodes[k] / nmax, 2);
  CHECK(std::sqrt(num / nodes.size()) < 1e-3);
  CHECK(e.time_used == doctest::Approx(b.total_time).epsilon(1e-9));
}

TEST_CASE("Fourier error shrinks as one over total time") {
  const JointSpectrum s = cfts::testing::multiplex_source();
  BenchSpec b = cfts::testing::multiplex_bench(64, 24);
  const BenchReport full = compare(s, b);
  b.total_time /= 2;
  const BenchReport half = compare(s, b);
  CHECK(half.mean_mse_fourier / full.mean_mse_fourier == doctest::Approx(2.0).epsilon(0.2));
  CHECK(half.mean_mse_scanning / full.mean_mse_scanning == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("scanning estimate is unbiased where clipping is inactive") {
  const JointSpectrum s = cfts::testing::multiplex_source();
  BenchSpec b = cfts::testing::multiplex_bench(16);
  b.dark_coinc_rate = 10.0;
  b.trials = 200;
  const BenchReport r = compare(s, b);
  const double t_pix = b.total_time / 256;
  std::size_t eligible = 0, inside = 0;
  double sum_dev = 0.0, sum_var = 0.0;
  for (std::size_t k = 0; k < r.truth.size(); ++k) {
    const double signal = t_pix * b.pair_rate_scale * r.truth[k];
    if (signal < 5.0 * std::sqrt(signal + t_pix * b.dark_coinc_rate)) continue;
    ++eligible;
    const double sd = r.mean_scanning[k] / r.snr_scanning[k];
    const double se = sd / std::sqrt(static_cast<double>(b.trials));
    if (std::abs(r.mean_scanning[k] - r.truth[k]) <= 3 * se) ++inside;
    sum_dev += r.mean_scanning[k] - r.truth[k];
    sum_var += se * se;
  }
  REQUIRE(eligible > 20);
  // Each pixel leaves 3 SE with probability 0.0027.
  CHECK(eligible - inside <= 2);
  CHECK(std::abs(sum_dev) <= 3 * std::sqrt(sum_var));
}

TEST_CASE("reports are deterministic and time-fair") {
  const JointSpectrum s = cfts::testing::multiplex_source();
  BenchSpec b = cfts::testing::multiplex_bench(16, 12);
  b.trials = 12;
  b.workers = 1;
  const BenchReport a = compare(s, b);
  b.workers = 3;
  const BenchReport c = compare(s, b);
  CHECK(report_text(a) == report_text(c));
  CHECK(a.time_fourier == doctest::Approx(b.total_time).epsilon(1e-9));
  CHECK(a.time_scanning == doctest::Approx(b.total_time).epsilon(1e-9));
  for (double m : a.mse_fourier) CHECK(m >= 0.0);
  CHECK(std::isfinite(a.advantage_ratio));
  b.rng_seed += 1;
  CHECK(report_text(compare(s, b)) != report_text(a));
}

TEST_CASE("regime labels and flags") {
  const JointSpectrum s = cfts::testing::multiplex_source();
  BenchSpec b = cfts::testing::multiplex_bench(16, 12);
  b.trials = 1;
  b.dark_coinc_rate = 0.0;
  const BenchReport r = compare(s, b);
  CHECK(r.regime == Regime::SignalDominated);
  CHECK(r.insufficient_trials);
  const std::string text = report_text(r);
  CHECK(text.find("regime = signal-dominated") != std::string::npos);
  CHECK(text.find("insufficient_statistics = yes") != std::string::npos);
  CHECK(text.find("advantage_claimed = no") != std::string::npos);

  b.dark_coinc_rate = 100.0;
  b.trials = 10;
  const BenchReport d = compare(s, b);
  CHECK(d.regime == Regime::DarkDominated);
  CHECK_FALSE(d.insufficient_trials);
  CHECK(d.mean_signal_rate_per_pixel == doctest::Approx(1000.0 / 256).epsilon(3e-3));

  b.total_time = 1e-3;
  CHECK(compare(s, b).low_counts);
}

TEST_CASE("invalid bench settings") {
  BenchSpec b = cfts::testing::multiplex_bench(16);
  auto bad = [](BenchSpec x) { CHECK_THROWS_AS(x.validate(), ConfigError); };
  BenchSpec x = b;
  x.total_time = 0;
  bad(x);
  x = b;
  x.pair_rate_scale = -1;
  bad(x);
  x = b;
  x.dark_coinc_rate = -1;
  bad(x);
  x = b;
  x.pixels_a = 0;
  bad(x);
  x = b;
  x.trials = 0;
  bad(x);
}

TEST_CASE("default-source regression values") {
  const JointSpectrum s = cfts::testing::paper_source(160);
  BenchSpec b;
  b.band = {2.18 * kRadPerFs, 2.66 * kRadPerFs, 0.7 * kRadPerFs, 0.7 * kRadPerFs};
  b.mesh = interf::mesh_plan(b.band, 800, 40, femtoseconds(0.57), femtoseconds(2));
  b.total_time = 96000.0;
  b.dark_coinc_rate = 100.0;
  b.pixels_a = b.pixels_b = 32;
  b.trials = 3;
  const BenchReport r = compare(s, b);
  CHECK(r.mean_mse_fourier == doctest::Approx(3.596252486929e-06).epsilon(1e-6));
  CHECK(r.mean_mse_scanning == doctest::Approx(6.298861621036e-07).epsilon(1e-6));
}
