#include "cfts/noise_bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

namespace cfts::bench {

namespace {

constexpr std::uint64_t kScanStream = 0x5ca1;
constexpr std::uint64_t kFourierStream = 0xf0e1;

// Visits the supersample points of pixel (i, j), returning their mean.
template <class Fn>
double pixel_mean(const BenchSpec& b, std::size_t i, std::size_t j, Fn&& fn) {
  const double wa = b.band.bandwidth_a / static_cast<double>(b.pixels_a);
  const double wb = b.band.bandwidth_b / static_cast<double>(b.pixels_b);
  const std::size_t s = b.supersample;
  double sum = 0.0;
  for (std::size_t p = 0; p < s; ++p)
    for (std::size_t q = 0; q < s; ++q) {
      const double a = b.band.a_min() + wa * (static_cast<double>(i) +
                                              (static_cast<double>(p) + 0.5) / static_cast<double>(s));
      const double c = b.band.b_min() + wb * (static_cast<double>(j) +
                                              (static_cast<double>(q) + 0.5) / static_cast<double>(s));
      sum += fn(a, c);
    }
  return sum / static_cast<double>(s * s);
}

interf::ScanPlan bench_plan(const BenchSpec& b) {
  return b.mesh ? *b.mesh : interf::plan_scan(b.band, b.plan);
}

struct FourierSetup {
  interf::ScanPlan plan;
  Array2D<double> relative;
  double dwell = 0.0;
};

FourierSetup fourier_setup(const JointSpectrum& spectrum, const BenchSpec& b) {
  FourierSetup f;
  f.plan = bench_plan(b);
  f.relative = interf::relative_coincidence(spectrum, f.plan, 1.0, b.workers);
  f.dwell = b.total_time / static_cast<double>(f.plan.points());
  return f;
}

Estimate fourier_estimate(const FourierSetup& f, const BenchSpec& b, std::size_t trial,
                          bool sampled, bool with_sigma) {
  interf::DetectionSpec det;
  det.dwell = f.dwell;
  det.pair_rate_scale = b.pair_rate_scale;
  det.dark_coinc_rate = b.dark_coinc_rate;
  det.rng_seed = mix_seed(mix_seed(b.rng_seed, kFourierStream), trial);
  const interf::Interferogram ig = interf::detect(f.plan, f.relative, det, sampled);
  auto map = std::make_shared<recon::FrequencyMap>(recon::dft2(ig));
  const recon::JointReadout readout(map);
  const double to_probability = b.pixel_area() / (f.dwell * b.pair_rate_scale);

  Estimate out;
  out.value = Array2D<double>(b.pixels_a, b.pixels_b);
  out.sigma = Array2D<double>(b.pixels_a, b.pixels_b, 0.0);
  out.time_used = f.dwell * static_cast<double>(f.plan.points());
  for (std::size_t i = 0; i < b.pixels_a; ++i)
    for (std::size_t j = 0; j < b.pixels_b; ++j)
      out.value(i, j) =
          to_probability * pixel_mean(b, i, j, [&](double a, double c) { return readout.value(a, c); });
  if (with_sigma && sampled) {
    const recon::PoissonErrors errors(*map, ig);
    const double per_point = to_probability / static_cast<double>(b.supersample * b.supersample);
    for (std::size_t i = 0; i < b.pixels_a; ++i)
      for (std::size_t j = 0; j < b.pixels_b; ++j) {
        recon::LinearForm form;
        pixel_mean(b, i, j, [&](double a, double c) {
          for (const auto& [k, w] : readout.form(a, c)) form.emplace_back(k, w * per_point);
          return 0.0;
        });
        out.sigma(i, j) = std::sqrt(std::max(0.0, errors.variance(form)));
      }
  }
  return out;
}

Estimate scanning_estimate(const Array2D<double>& truth, const BenchSpec& b, std::size_t trial,
                           bool sampled) {
  const double pixels = static_cast<double>(b.pixels_a * b.pixels_b);
  const double t_pix = b.total_time / pixels;
  const std::uint64_t seed = mix_seed(mix_seed(b.rng_seed, kScanStream), trial);
  Estimate out;
  out.value = Array2D<double>(b.pixels_a, b.pixels_b);
  out.sigma = Array2D<double>(b.pixels_a, b.pixels_b);
  out.time_used = t_pix * pixels;
  for (std::size_t i = 0; i < b.pixels_a; ++i)
    for (std::size_t j = 0; j < b.pixels_b; ++j) {
      const double mean = t_pix * (b.pair_rate_scale * truth(i, j) + b.dark_coinc_rate);
      double counts = mean;
      if (sampled) {
        SplitMix64 rng(mix_seed(seed, i * b.pixels_b + j));
        counts = mean > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng))
                            : 0.0;
      }
      const double rate = (counts - b.dark_coinc_rate * t_pix) / t_pix;
      out.value(i, j) = std::max(0.0, rate) / b.pair_rate_scale;
      out.sigma(i, j) = sampled ? std::sqrt(counts) / (t_pix * b.pair_rate_scale) : 0.0;
    }
  return out;
}

}  // namespace

void BenchSpec::validate() const {
  if (!(total_time > 0.0 && std::isfinite(total_time)))
    throw ConfigError("bench total_time must be positive");
  if (!(dark_coinc_rate >= 0.0 && std::isfinite(dark_coinc_rate)))
    throw ConfigError("bench dark_coinc_rate must be nonnegative");
  if (!(pair_rate_scale > 0.0 && std::isfinite(pair_rate_scale)))
    throw ConfigError("bench pair_rate_scale must be positive");
  if (pixels_a < 1 || pixels_b < 1) throw ConfigError("bench spectral_pixels must be positive");
  if (trials < 1) throw ConfigError("bench trials must be at least 1");
  if (supersample < 1) throw ConfigError("bench supersample must be at least 1");
  band.validate();
}

SpectralGrid BenchSpec::pixel_centres() const {
  const double wa = band.bandwidth_a / static_cast<double>(pixels_a);
  const double wb = band.bandwidth_b / static_cast<double>(pixels_b);
  return {UniformAxis{band.a_min() + 0.5 * wa, wa, pixels_a},
          UniformAxis{band.b_min() + 0.5 * wb, wb, pixels_b},
          SpectralQuantity::AngularFrequency};
}

double BenchSpec::pixel_area() const {
  return band.bandwidth_a * band.bandwidth_b / static_cast<double>(pixels_a * pixels_b);
}

Array2D<double> pixel_truth(const JointSpectrum& spectrum, const BenchSpec& bench) {
  spectrum.validate();
  bench.validate();
  const double scale = bench.pixel_area() / spectrum.integral();
  Array2D<double> out(bench.pixels_a, bench.pixels_b);
  for (std::size_t i = 0; i < bench.pixels_a; ++i)
    for (std::size_t j = 0; j < bench.pixels_b; ++j)
      out(i, j) = scale * pixel_mean(bench, i, j, [&](double a, double c) {
                    return spectrum.interpolate(a, c);
                  });
  return out;
}

Estimate scanning_baseline(const JointSpectrum& spectrum, const BenchSpec& bench,
                           std::size_t trial, bool sampled) {
  return scanning_estimate(pixel_truth(spectrum, bench), bench, trial, sampled);
}

Estimate fourier_run(const JointSpectrum& spectrum, const BenchSpec& bench, std::size_t trial,
                     bool sampled) {
  bench.validate();
  return fourier_estimate(fourier_setup(spectrum, bench), bench, trial, sampled, true);
}

double mean_squared_error(const Array2D<double>& estimate, const Array2D<double>& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw DomainError("estimate and truth shapes differ");
  double sum = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = estimate[k] - truth[k];
    sum += d * d;
  }
  return sum / static_cast<double>(truth.size());
}

BenchReport compare(const JointSpectrum& spectrum, const BenchSpec& bench) {
  bench.validate();
  BenchReport r;
  r.spec = bench;
  r.truth = pixel_truth(spectrum, bench);
  const FourierSetup setup = fourier_setup(spectrum, bench);
  const std::size_t n = bench.trials;
  const std::size_t na = bench.pixels_a, nb = bench.pixels_b;

  std::vector<Estimate> fourier(n), scanning(n);
  parallel_for(n, bench.workers, [&](std::size_t t) {
    fourier[t] = fourier_estimate(setup, bench, t, true, false);
    scanning[t] = scanning_estimate(r.truth, bench, t, true);
  });

  r.mse_fourier.resize(n);
  r.mse_scanning.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    r.mse_fourier[t] = mean_squared_error(fourier[t].value, r.truth);
    r.mse_scanning[t] = mean_squared_error(scanning[t].value, r.truth);
    r.mean_mse_fourier += r.mse_fourier[t] / static_cast<double>(n);
    r.mean_mse_scanning += r.mse_scanning[t] / static_cast<double>(n);
    if (r.mse_fourier[t] < r.mse_scanning[t]) ++r.fourier_wins;
  }
  r.advantage_ratio = r.mean_mse_scanning / r.mean_mse_fourier;

  auto moments = [&](const std::vector<Estimate>& runs, Array2D<double>& mean,
                     Array2D<double>& snr) {
    mean = Array2D<double>(na, nb, 0.0);
    snr = Array2D<double>(na, nb, 0.0);
    for (std::size_t k = 0; k < na * nb; ++k) {
      double s1 = 0.0, s2 = 0.0;
      for (const auto& e : runs) s1 += e.value[k];
      const double m = s1 / static_cast<double>(n);
      for (const auto& e : runs) s2 += (e.value[k] - m) * (e.value[k] - m);
      mean[k] = m;
      const double sd = n > 1 ? std::sqrt(s2 / static_cast<double>(n - 1)) : 0.0;
      snr[k] = sd > 0.0 ? m / sd : 0.0;
    }
  };
  moments(fourier, r.mean_fourier, r.snr_fourier);
  moments(scanning, r.mean_scanning, r.snr_scanning);

  double signal = 0.0;
  for (double p : r.truth.values()) signal += p;
  r.mean_signal_rate_per_pixel = bench.pair_rate_scale * signal / static_cast<double>(na * nb);
  r.regime = bench.dark_coinc_rate >= 10.0 * r.mean_signal_rate_per_pixel ? Regime::DarkDominated
                                                                           : Regime::SignalDominated;
  r.time_fourier = fourier.front().time_used;
  r.time_scanning = scanning.front().time_used;
  r.plan_points = setup.plan.points();
  r.insufficient_trials = n < 10;
  const double t_pix = bench.total_time / static_cast<double>(na * nb);
  double peak = 0.0;
  for (double p : r.truth.values()) peak = std::max(peak, p);
  r.low_counts = t_pix * bench.pair_rate_scale * peak < 1.0;
  return r;
}

std::string to_string(Regime r) {
  return r == Regime::DarkDominated ? "dark-dominated" : "signal-dominated";
}

void write_report(std::ostream& out, const BenchReport& r) {
  std::ostringstream s;
  s << std::setprecision(17);
  const auto& b = r.spec;
  s << "format = bench-report 1\n";
  s << "total_time_s = " << b.total_time << "\n";
  s << "dark_coinc_rate_per_s = " << b.dark_coinc_rate << "\n";
  s << "pair_rate_scale_per_s = " << b.pair_rate_scale << "\n";
  s << "spectral_pixels = " << b.pixels_a << "x" << b.pixels_b << "\n";
  s << "trials = " << b.trials << "\n";
  s << "rng_seed = " << b.rng_seed << "\n";
  s << "plan_points = " << r.plan_points << "\n";
  s << "time_used_fourier_s = " << r.time_fourier << "\n";
  s << "time_used_scanning_s = " << r.time_scanning << "\n";
  s << "mean_signal_rate_per_pixel_per_s = " << r.mean_signal_rate_per_pixel << "\n";
  s << "regime = " << to_string(r.regime) << "\n";
  s << "mse_fourier = " << r.mean_mse_fourier << "\n";
  s << "mse_scanning = " << r.mean_mse_scanning << "\n";
  s << "advantage_ratio = " << r.advantage_ratio << "\n";
  s << "fourier_wins = " << r.fourier_wins << "\n";
  s << "advantage_claimed = "
    << (r.regime == Regime::DarkDominated && !r.insufficient_trials && r.advantage_ratio > 1.0
            ? "yes"
            : "no")
    << "\n";
  s << "insufficient_statistics = " << (r.insufficient_trials ? "yes" : "no") << "\n";
  s << "low_counts_warning = " << (r.low_counts ? "yes" : "no") << "\n";
  auto list = [&](const char* key, const std::vector<double>& v) {
    s << key << " =";
    for (double x : v) s << ' ' << x;
    s << "\n";
  };
  list("trial_mse_fourier", r.mse_fourier);
  list("trial_mse_scanning", r.mse_scanning);
  out << s.str();
}

}  // namespace cfts::bench
