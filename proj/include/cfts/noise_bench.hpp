#pragma once

// Equal-time comparison of the Fourier method against a scanning
// two-monochromator measurement under additive dark coincidences.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfts/common.hpp"
#include "cfts/interferometer.hpp"
#include "cfts/reconstruction.hpp"

namespace cfts::bench {

struct BenchSpec {
  double total_time = 9600.0;        // s, shared by both methods
  double dark_coinc_rate = 100.0;    // 1/s
  double pair_rate_scale = 1000.0;   // 1/s
  std::size_t pixels_a = 64;         // scanning baseline grid over `band`
  std::size_t pixels_b = 64;
  std::size_t trials = 100;
  std::uint64_t rng_seed = 1;
  interf::SpectralBand band;         // region both methods estimate
  interf::PlanOptions plan;          // Fourier scan; dwell follows from total_time
  std::optional<interf::ScanPlan> mesh;  // explicit scan, overrides `plan`
  recon::ExtractOptions extract;
  std::size_t supersample = 4;       // per pixel and axis, for truth and Fourier readout
  unsigned workers = 0;

  /// Throws ConfigError. trials < 10 is allowed and flagged in the report.
  void validate() const;
  SpectralGrid pixel_centres() const;
  double pixel_area() const;
};

/// Normalized estimates: probability that a pair falls in each pixel.
struct Estimate {
  Array2D<double> value;
  Array2D<double> sigma;
  double time_used = 0.0;
};

/// Pixel-averaged truth, int_pixel S / int S, by supersampling.
Array2D<double> pixel_truth(const JointSpectrum& spectrum, const BenchSpec& bench);

/// Scanning estimate for one trial. With sampled = false expected counts are
/// used directly.
Estimate scanning_baseline(const JointSpectrum& spectrum, const BenchSpec& bench,
                           std::size_t trial = 0, bool sampled = true);

/// Fourier estimate for one trial, resampled onto the pixel grid.
Estimate fourier_run(const JointSpectrum& spectrum, const BenchSpec& bench, std::size_t trial = 0,
                     bool sampled = true);

enum class Regime { DarkDominated, SignalDominated };

struct BenchReport {
  BenchSpec spec;
  std::vector<double> mse_fourier;   // per trial
  std::vector<double> mse_scanning;  // per trial
  double mean_mse_fourier = 0.0;
  double mean_mse_scanning = 0.0;
  double advantage_ratio = 0.0;      // mean_mse_scanning / mean_mse_fourier
  std::size_t fourier_wins = 0;
  Regime regime = Regime::SignalDominated;
  double mean_signal_rate_per_pixel = 0.0;
  double time_fourier = 0.0;
  double time_scanning = 0.0;
  std::size_t plan_points = 0;
  bool insufficient_trials = false;
  bool low_counts = false;           // scanning peak expects < 1 count
  Array2D<double> truth;
  Array2D<double> snr_fourier;       // mean / std across trials
  Array2D<double> snr_scanning;
  Array2D<double> mean_fourier;
  Array2D<double> mean_scanning;
};

double mean_squared_error(const Array2D<double>& estimate, const Array2D<double>& truth);

BenchReport compare(const JointSpectrum& spectrum, const BenchSpec& bench);

std::string to_string(Regime r);

/// key = value lines; arrays are written as separate grid files.
void write_report(std::ostream& out, const BenchReport& report);

}  // namespace cfts::bench
