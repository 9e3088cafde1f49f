#pragma once

#include <cmath>

#include "cfts/common.hpp"

namespace cfts::testing {

inline constexpr double kRadPerFs = 1e15;

/// exp(-(w_A - a0)^2 / sa^2 - (w_B - b0)^2 / sb^2) on an n x n grid of
/// half-width `half_span` around the centres. When `lattice` is set the axis
/// starts sit on integer multiples of the step.
inline JointSpectrum gaussian_spectrum(double a0, double b0, double sa, double sb,
                                       double half_span, std::size_t n, bool lattice = true) {
  const double step = 2.0 * half_span / static_cast<double>(n);
  auto axis = [&](double c) {
    double start = c - half_span + 0.5 * step;
    if (lattice) start = std::round(start / step) * step;
    return UniformAxis{start, step, n};
  };
  JointSpectrum s{{axis(a0), axis(b0), SpectralQuantity::AngularFrequency},
                  Array2D<double>(n, n)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double da = (s.grid.a.at(i) - a0) / sa;
      const double db = (s.grid.b.at(j) - b0) / sb;
      s.intensity(i, j) = std::exp(-da * da - db * db);
    }
  return s;
}

/// Degenerate 780 nm pair, 0.06 rad/fs 1/e half-width, +-0.3 rad/fs window.
inline JointSpectrum degenerate_gaussian(std::size_t n = 128) {
  const double w0 = omega_from_wavelength(nanometers(780));
  return gaussian_spectrum(w0, w0, 0.06 * kRadPerFs, 0.06 * kRadPerFs, 0.3 * kRadPerFs, n);
}

/// Lattice spacing of the matched round-trip source.
inline constexpr double kMatchedSpacing = 0.032 * kRadPerFs;

/// 128 x 128 degenerate 780 nm Gaussian (1/e half-width 0.06 rad/fs) whose
/// nodes sit on the kMatchedSpacing lattice. Only the +-0.3 rad/fs core is
/// non-negligible.
inline JointSpectrum matched_gaussian(std::size_t n = 128) {
  const double w0 = omega_from_wavelength(nanometers(780));
  const double h = kMatchedSpacing;
  const double start = std::round(w0 / h - static_cast<double>(n / 2)) * h;
  JointSpectrum s{{UniformAxis{start, h, n}, UniformAxis{start, h, n},
                   SpectralQuantity::AngularFrequency},
                  Array2D<double>(n, n)};
  const double sigma = 0.06 * kRadPerFs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double da = (s.grid.a.at(i) - w0) / sigma;
      const double db = (s.grid.b.at(j) - w0) / sigma;
      s.intensity(i, j) = std::exp(-da * da - db * db);
    }
  return s;
}

}  // namespace cfts::testing

#include "cfts/noise_bench.hpp"
#include "cfts/spdc_model.hpp"

namespace cfts::testing {

/// Separable Gaussian used for the multiplex comparison: centres 2.2 and
/// 2.6 rad/fs, 1/e half-widths 0.1 and 0.12 rad/fs, 96 x 96 over +-0.5.
inline JointSpectrum multiplex_source() {
  return gaussian_spectrum(2.2 * kRadPerFs, 2.6 * kRadPerFs, 0.1 * kRadPerFs, 0.12 * kRadPerFs,
                           0.5 * kRadPerFs, 96, false);
}

/// Dark-dominated comparison: 100 dark coincidences/s against 1000 pairs/s
/// shared by pixels x pixels monochromator settings, 9.6 ks in total.
inline bench::BenchSpec multiplex_bench(std::size_t pixels, int resolution_divisions = 16) {
  bench::BenchSpec b;
  b.total_time = 9600.0;
  b.dark_coinc_rate = 100.0;
  b.pair_rate_scale = 1000.0;
  b.pixels_a = b.pixels_b = pixels;
  b.trials = 100;
  b.rng_seed = 2024;
  b.band = {2.2 * kRadPerFs, 2.6 * kRadPerFs, 1.0 * kRadPerFs, 1.0 * kRadPerFs};
  b.plan.oversampling = 1.5;
  b.plan.resolution_divisions = resolution_divisions;
  b.plan.resolve_marginal_terms = true;
  return b;
}

/// Default source geometry on an n x n frequency grid spanning 760-1000 nm
/// (photon A) and 620-800 nm (photon B); unit maximum.
inline JointSpectrum paper_source(std::size_t n) {
  const SpectralGrid grid = frequency_grid_from_wavelengths(
      nanometers(760), nanometers(1000), n, nanometers(620), nanometers(800), n);
  return spdc::joint_intensity(
      spdc::joint_amplitude(grid, spdc::CrystalSpec{}, spdc::PumpSpec{}, spdc::CollectionSpec{},
                            spdc::QuadratureSpec{}),
      true);
}

}  // namespace cfts::testing
