#pragma once

// Fourier analysis of coincidence interferograms: 2D DFT on the scan grid,
// separation of the DC, single-photon and joint terms, resampling to
// wavelength axes and cross-sections with Poisson error bars.

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cfts/common.hpp"
#include "cfts/interferometer.hpp"

namespace cfts::recon {

enum class Window { None, RaisedCosine };

/// DFT of an interferogram over its (u, v) grid, stored in FFT order: bin
/// (k_u, k_v) holds frequency (s(k_u) du_bin, s(k_v) dv_bin) along (e_u, e_v)
/// with s(k) = k for k < n/2 and k - n otherwise. Zero frequency is (0, 0).
/// Sign convention: a sample pattern exp(+i W.tau) lands at positive W.
struct FrequencyMap {
  interf::ScanPlan plan;
  Array2D<complex> values;
  Window window = Window::None;
  bool detrended = false;
  double mean_removed = 0.0;
  double count_sum = 0.0;   // zero bin of the plain transform
  std::vector<double> window_u, window_v;

  double delta_u() const;  // rad/s per bin along e_u
  double delta_v() const;
  static long signed_index(std::size_t k, std::size_t n);
  /// Physical (Omega_A, Omega_B) of a possibly fractional signed bin.
  std::pair<double, double> physical(double ku, double kv) const;
  /// Fractional signed bin coordinates of a physical frequency (unwrapped).
  std::pair<double, double> bin_of(double omega_a, double omega_b) const;
  /// Sum of window weights; n_u * n_v without a window.
  double coherent_gain() const;
};

FrequencyMap dft2(const interf::Interferogram& interferogram, Window window = Window::None,
                  bool detrend = false);

/// Forward DFT of a real grid with the FrequencyMap convention.
Array2D<complex> dft2(const Array2D<double>& values);

enum class Region : std::uint8_t {
  Dc,
  MarginalA,
  MarginalB,
  JointSum,         // Omega_A > 0, Omega_B >= 0
  JointSumMirror,   // Omega_A < 0, Omega_B <= 0
  JointDiff,        // Omega_A >= 0, Omega_B < 0
  JointDiffMirror,  // Omega_A <= 0, Omega_B > 0
};

Region mirror(Region r);

struct ExtractOptions {
  double dc_radius = 2.0;       // bins
  double axis_halfwidth = 2.0;  // bins along v either side of an axis line
  /// Frequency grid for the joint term; default spans the plan band.
  std::optional<SpectralGrid> joint_grid;
};

/// Sparse weights on |X_k| (flat FFT-order bin index).
using LinearForm = std::vector<std::pair<std::size_t, double>>;

/// Reads the joint term at arbitrary (omega_A, omega_B) by bilinear
/// interpolation of |X| between bins. Values outside the plan band are 0.
class JointReadout {
 public:
  JointReadout(std::shared_ptr<const FrequencyMap> map);
  double value(double omega_a, double omega_b) const;
  LinearForm form(double omega_a, double omega_b) const;
  const FrequencyMap& map() const { return *map_; }
  /// Converts 16 |X| / (gain du dv) into pair-rate density units.
  double scale() const { return scale_; }

 private:
  std::shared_ptr<const FrequencyMap> map_;
  double scale_ = 0.0;
};

struct TermDecomposition {
  double dc_weight = 0.0;
  SpectralGrid grid;  // joint grid; marginal_a runs along grid.a, marginal_b along grid.b
  std::vector<double> marginal_a;
  std::vector<double> marginal_b;
  JointSpectrum joint;
  Array2D<Region> regions;  // per bin, FFT order
  ExtractOptions options;
  bool marginals_overlap = false;
  std::shared_ptr<const JointReadout> readout;  // absent for hand-built terms
};

/// Joint and marginal values are densities scaled so that, for counts
/// dwell * (R p / p(0) + D), joint ~ dwell R S / int S and marginal_a ~
/// dwell R int S dw_B / int S.
TermDecomposition extract_terms(const FrequencyMap& map, const ExtractOptions& options = {});

struct WavelengthGridSpec {
  double a_min = 0.0, a_max = 0.0;
  std::size_t n_a = 0;
  double b_min = 0.0, b_max = 0.0;
  std::size_t n_b = 0;
};

struct WavelengthMap {
  JointSpectrum spectrum;  // wavelength axes, unit maximum
  bool jacobian = true;
  double peak_value = 0.0;  // maximum before normalization
  std::pair<std::size_t, std::size_t> peak;
  SpectralGrid source_grid;  // frequency grid it was resampled from
  std::shared_ptr<const JointReadout> readout;
};

/// Resamples the joint term to wavelength axes (default: the wavelength
/// image of the joint grid, same point counts).
WavelengthMap joint_in_wavelength(const TermDecomposition& terms, bool apply_jacobian = true,
                                  const std::optional<WavelengthGridSpec>& grid = std::nullopt);

/// Linear Poisson error propagation through the modulus of the DFT.
class PoissonErrors {
 public:
  /// Variance of each count is the count itself.
  PoissonErrors(const FrequencyMap& map, const interf::Interferogram& counts);
  double variance(const LinearForm& form) const;

 private:
  const FrequencyMap* map_;
  Array2D<complex> spectrum_of_variance_;
};

enum class LineKind { Sum, Difference };

struct CrossSectionOptions {
  std::size_t samples = 201;
  /// Wavelengths (lambda_A, lambda_B) the line passes through; default is
  /// the map maximum (lowest index on ties).
  std::optional<std::pair<double, double>> anchor;
};

/// Line 1/lambda_A = x0 + t, 1/lambda_B = y0 -+ t through the anchor; the
/// abscissa t is in 1/m.
struct CrossSection {
  LineKind kind = LineKind::Sum;
  double anchor_a = 0.0;
  double anchor_b = 0.0;
  std::vector<double> abscissa;
  std::vector<double> values;
  std::vector<double> sigma;
};

CrossSection cross_section(const WavelengthMap& map, LineKind kind,
                           const CrossSectionOptions& options = {},
                           const PoissonErrors* errors = nullptr);

/// Linear form of the normalized wavelength map at (lambda_A, lambda_B).
LinearForm wavelength_map_form(const WavelengthMap& map, double lambda_a, double lambda_b);

}  // namespace cfts::recon
