#pragma once

// Forward model of the coincidence interferogram recorded with two variable
// delays, fringe-aligned scan planning and Poisson synthesis.
//
// Delays in seconds, frequencies in rad/s.

#include <optional>
#include <string>
#include <vector>

#include "cfts/common.hpp"

namespace cfts::interf {

struct DelayRange {
  double min = femtoseconds(-250);
  double max = femtoseconds(250);
};

/// Rectangle of (omega_A, omega_B) that the scan must resolve.
struct SpectralBand {
  double center_a = 0.0;
  double center_b = 0.0;
  double bandwidth_a = 0.0;  // full width
  double bandwidth_b = 0.0;

  double a_min() const { return center_a - 0.5 * bandwidth_a; }
  double a_max() const { return center_a + 0.5 * bandwidth_a; }
  double b_min() const { return center_b - 0.5 * bandwidth_b; }
  double b_max() const { return center_b + 0.5 * bandwidth_b; }
  void validate() const;
  /// Smallest band containing every cell of the grid, padded by half a cell.
  static SpectralBand covering(const SpectralGrid& grid);
  bool operator==(const SpectralBand&) const = default;
};

/// Rotated rectangular delay grid. Point (i_u, i_v) sits at
/// origin + i_u du e_u + i_v dv e_v with e_u = (cos r, sin r) and
/// e_v = (-sin r, cos r) in the (tau_A, tau_B) plane.
struct ScanPlan {
  double rotation = 0.0;
  double du = 0.0;
  double dv = 0.0;
  std::size_t n_u = 0;
  std::size_t n_v = 0;
  double origin_a = 0.0;
  double origin_b = 0.0;
  SpectralBand band;            // region of interest the plan was built for
  double matched_spacing = 0.0;  // omega lattice the plan is commensurate with, 0 if none

  double tau_a(std::size_t iu, std::size_t iv) const;
  double tau_b(std::size_t iu, std::size_t iv) const;
  std::size_t points() const { return n_u * n_v; }
  /// Structural checks only (positive steps, at least 2x2 points).
  void validate() const;
  bool operator==(const ScanPlan&) const = default;
};

struct DetectionSpec {
  double dwell = 3.0;              // s per point
  double pair_rate_scale = 1000.0;  // coincidences/s at zero delay
  double dark_coinc_rate = 0.0;     // coincidences/s, uniform
  std::uint64_t rng_seed = 1;
  double visibility = 1.0;  // multiplies each cosine

  void validate() const;
  bool operator==(const DetectionSpec&) const = default;
};

enum class CountKind { Expected, Sampled };

struct Interferogram {
  ScanPlan plan;
  Array2D<double> counts;  // n_u rows by n_v columns
  CountKind kind = CountKind::Expected;
  DetectionSpec detection;

  void validate() const;
};

/// (1/4) sum S (1 + V cos w_A t_A)(1 + V cos w_B t_B) dw_A dw_B over the grid
/// cells. Equals sum S dw_A dw_B at zero delay.
double coincidence_probability(const JointSpectrum& spectrum, double tau_a, double tau_b,
                               double visibility = 1.0);

/// Same sum as coincidence_probability, with the spectrum's marginals cached
/// for repeated evaluation.
class CoincidenceModel {
 public:
  explicit CoincidenceModel(const JointSpectrum& spectrum, double visibility = 1.0);
  double operator()(double tau_a, double tau_b) const;
  double zero_delay() const { return zero_delay_; }

 private:
  std::vector<double> omega_a_, omega_b_;
  Array2D<double> s_;
  std::vector<double> row_sums_, col_sums_;
  double total_ = 0.0;
  double visibility_ = 1.0;
  double cell_ = 0.0;
  double zero_delay_ = 0.0;
};

/// Angle of the fringe-perpendicular axis, atan2(omega_B0, omega_A0).
double fringe_rotation(double omega_a0, double omega_b0);

/// Largest fringe-perpendicular step that samples the centre fringe at the
/// Nyquist rate: pi / |(omega_A0, omega_B0)|.
double fringe_nyquist_step(double omega_a0, double omega_b0);

struct PlanOptions {
  double oversampling = 1.2;
  int resolution_divisions = 8;  // Fourier bins per bandwidth, at least
  DelayRange range;
  std::optional<std::size_t> n_u;  // fixed point counts; the steps follow
  std::optional<std::size_t> n_v;
  /// When positive, choose a rational rotation and scan lengths so every
  /// frequency on the lattice k * spacing falls on a DFT bin.
  double matched_spacing = 0.0;
  /// Also keep the single-photon axis terms free of aliasing along v.
  bool resolve_marginal_terms = false;
};

/// Step limits and the axis frame derived from a band.
struct ScanRequirements {
  double rotation = 0.0;
  double du_max = 0.0;
  double dv_max = 0.0;
  double min_length = 0.0;  // scan length for the requested resolution
  double joint_u_min = 0.0;
  double marginal_u_max = 0.0;
};

ScanRequirements scan_requirements(const SpectralBand& band, double rotation,
                                   double oversampling, int resolution_divisions = 8,
                                   bool resolve_marginal_terms = false);

ScanPlan plan_scan(const SpectralBand& band, const PlanOptions& options = {});
ScanPlan plan_scan(double omega_a0, double omega_b0, double bandwidth_a, double bandwidth_b,
                   double oversampling);

/// Explicit n_u x n_v mesh with point (n_u/2, n_v/2) at zero delay; rotation
/// defaults to the fringe rotation of the band centre. Not checked against
/// sampling or range limits (see check_plan).
ScanPlan mesh_plan(const SpectralBand& band, std::size_t n_u, std::size_t n_v, double du,
                   double dv, std::optional<double> rotation = std::nullopt);

struct PlanCheck {
  bool resolution_ok = true;
  std::vector<std::string> warnings;
};

/// Validates an explicit plan against its band: throws DomainError when a
/// step breaks the Nyquist limit, the joint term cannot be separated from
/// the axis terms, or a point leaves the delay range. A scan too short for
/// the nominal resolution only produces a warning.
PlanCheck check_plan(const ScanPlan& plan, double oversampling, const DelayRange& range,
                     int resolution_divisions = 8);

/// Throws DomainError naming required vs available range if any corner of the
/// plan leaves the hardware delay range.
void check_delay_range(const ScanPlan& plan, const DelayRange& range);

/// Expected or Poisson-sampled counts
/// dwell * (pair_rate_scale * p(tau) / p(0, 0) + dark_coinc_rate).
Interferogram synthesize(const JointSpectrum& spectrum, const ScanPlan& plan,
                         const DetectionSpec& detection, bool sampled, unsigned workers = 0);

/// p(tau) / p(0, 0) at every plan point, clipped at zero.
Array2D<double> relative_coincidence(const JointSpectrum& spectrum, const ScanPlan& plan,
                                     double visibility = 1.0, unsigned workers = 0);

/// Counts from a precomputed relative_coincidence grid; bitwise equal to
/// synthesize() with the same detection settings.
Interferogram detect(const ScanPlan& plan, const Array2D<double>& relative,
                     const DetectionSpec& detection, bool sampled);

/// Rows [u_begin, u_end) and columns [v_begin, v_end) of synthesize(...);
/// values agree bitwise with the corresponding block of the full scan.
Array2D<double> synthesize_region(const JointSpectrum& spectrum, const ScanPlan& plan,
                                  const DetectionSpec& detection, bool sampled,
                                  std::size_t u_begin, std::size_t u_end, std::size_t v_begin,
                                  std::size_t v_end, unsigned workers = 0);

}  // namespace cfts::interf
