#pragma once

// Joint spectral amplitude and intensity of fiber-coupled photon pairs from a
// pulsed type-I (e -> o + o) downconversion source in a uniaxial crystal.
//
// Units are SI throughout: metres, seconds, rad/s, rad/m, radians.

#include <string>

#include "cfts/common.hpp"

namespace cfts::spdc {

/// One Sellmeier branch, n^2 = a + b / (l^2 - c) - d l^2 with l in micrometres.
struct SellmeierBranch {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  double index(double wavelength) const;
};

struct SellmeierSet {
  std::string name;
  std::string source;
  SellmeierBranch ordinary;
  SellmeierBranch extraordinary;
  double min_wavelength = nanometers(300);
  double max_wavelength = nanometers(1000);

  /// Beta barium borate, D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
  static SellmeierSet bbo_eimerl_1987();
};

struct CrystalSpec {
  double length = millimeters(1.0);
  double cut_angle = degrees(29.7);  // optic axis to pump propagation
  SellmeierSet sellmeier = SellmeierSet::bbo_eimerl_1987();

  void validate() const;
};

struct PumpSpec {
  double center_wavelength = nanometers(390);
  double duration_fwhm = femtoseconds(100);  // intensity FWHM, transform limited
  double waist_radius = micrometers(77.5);   // 1/e^2 intensity radius
  double average_power = 20e-3;
  double rep_rate = 80e6;

  double center_omega() const { return omega_from_wavelength(center_wavelength); }
  /// FWHM of the spectral intensity |E(omega)|^2 in rad/s (= 4 ln2 / duration).
  double spectral_fwhm() const;
  void validate() const;
};

struct CollectionSpec {
  double angle_a = degrees(1.28);  // external, photon A on the +x side
  double angle_b = degrees(1.05);  // external, photon B on the -x side
  double fiber_waist_a = micrometers(80);
  double fiber_waist_b = micrometers(80);

  void validate() const;
};

struct QuadratureSpec {
  int order = 12;  // Gauss-Hermite nodes per transverse dimension
  bool central_plane_wave_only = false;
  bool check_convergence = true;
  double convergence_tolerance = 1e-3;
  unsigned workers = 0;  // 0: available parallelism
};

struct TransverseWavevector {
  double x = 0.0;
  double y = 0.0;
};

struct JointAmplitude {
  SpectralGrid grid;
  Array2D<complex> amplitude;
};

/// Thrown when doubling the quadrature order changes the peak intensity by
/// more than the configured tolerance.
class QuadratureConvergenceError : public NumericError {
 public:
  QuadratureConvergenceError(int order, double value, double value_doubled);
  int order() const { return order_; }
  double value() const { return value_; }
  double value_doubled() const { return value_doubled_; }

 private:
  int order_;
  double value_;
  double value_doubled_;
};

double ordinary_index(const CrystalSpec& crystal, double wavelength);
/// Index seen by an extraordinary wave at angle theta to the optic axis.
double extraordinary_index(const CrystalSpec& crystal, double wavelength, double theta);

/// Gaussian pump spectral amplitude with unit peak at the pump centre.
complex pump_envelope(double omega_sum, const PumpSpec& pump);

/// Longitudinal wavevector mismatch k_p,z - k_A,z - k_B,z (rad/m) with each
/// k_z expanded paraxially. The pump is extraordinary at the cut angle.
double longitudinal_mismatch(double omega_a, double omega_b, TransverseWavevector q_a,
                             TransverseWavevector q_b, const CrystalSpec& crystal);

/// Signal frequency of the collinear (q = 0) phase-matched pair for a pump at
/// omega_pump. Searches the half of the band where omega_a < omega_pump / 2.
double collinear_phase_matched_omega(const CrystalSpec& crystal, double omega_pump);

JointAmplitude joint_amplitude(const SpectralGrid& grid, const CrystalSpec& crystal,
                               const PumpSpec& pump, const CollectionSpec& collection,
                               const QuadratureSpec& quadrature);

/// Amplitude at a single frequency pair (same integral as joint_amplitude).
complex joint_amplitude_at(double omega_a, double omega_b, const CrystalSpec& crystal,
                           const PumpSpec& pump, const CollectionSpec& collection,
                           const QuadratureSpec& quadrature);

/// Elementwise |A|^2, optionally scaled to unit maximum.
JointSpectrum joint_intensity(const JointAmplitude& amplitude, bool normalize = false);

}  // namespace cfts::spdc
