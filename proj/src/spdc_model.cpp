#include "cfts/spdc_model.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_roots.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>

namespace cfts::spdc {

namespace {

std::string nm_string(double wavelength) {
  std::ostringstream s;
  s << wavelength * 1e9 << " nm";
  return s.str();
}

void check_band(const SellmeierSet& set, double wavelength) {
  if (!(wavelength >= set.min_wavelength * (1 - 1e-12) &&
        wavelength <= set.max_wavelength * (1 + 1e-12))) {
    std::ostringstream s;
    s << "wavelength " << nm_string(wavelength) << " outside supported band "
      << set.min_wavelength * 1e9 << "-" << set.max_wavelength * 1e9 << " nm";
    throw DomainError(s.str());
  }
}

struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // for weight function exp(-x^2)
};

GaussHermiteRule gauss_hermite(int order) {
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, static_cast<std::size_t>(order),
                                  0.0, 1.0, 0.0, 0.0),
      &gsl_integration_fixed_free);
  if (!ws) throw NumericError("cannot build Gauss-Hermite rule");
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  GaussHermiteRule rule;
  rule.nodes.assign(x, x + order);
  rule.weights.assign(w, w + order);
  return rule;
}

double sinc_small(double phi) {
  const double p2 = phi * phi;
  return 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
}

// Integral over (q_A, q_B) of pump(q_A + q_B) u*_A(q_A) u*_B(q_B) phase(q_A, q_B).
// The three Gaussians are combined per transverse dimension into one
// correlated Gaussian N(mu, M^-1); tensor-product Gauss-Hermite then handles
// the smooth phase-matching factor.
class AmplitudeIntegral {
 public:
  AmplitudeIntegral(const CrystalSpec& crystal, const PumpSpec& pump,
                    const CollectionSpec& collection, int order)
      : crystal_(crystal), pump_(pump), collection_(collection), rule_(gauss_hermite(order)) {
    const double wp2 = pump.waist_radius * pump.waist_radius;
    wa2_ = collection.fiber_waist_a * collection.fiber_waist_a;
    wb2_ = collection.fiber_waist_b * collection.fiber_waist_b;
    m11_ = 0.5 * (wp2 + wa2_);
    m12_ = 0.5 * wp2;
    m22_ = 0.5 * (wp2 + wb2_);
    det_ = m11_ * m22_ - m12_ * m12_;
    // Cholesky factor of the covariance M^-1.
    const double s11 = m22_ / det_;
    const double s12 = -m12_ / det_;
    const double s22 = m11_ / det_;
    l11_ = std::sqrt(s11);
    l21_ = s12 / l11_;
    l22_ = std::sqrt(s22 - l21_ * l21_);
    // (2 pi / sqrt(det M))^2 for the Gaussian, 1 / pi^2 for the Hermite weights.
    prefactor_ = 4.0 / det_;

    const auto n = rule_.nodes.size();
    pair_weights_.resize(n * n);
    std::vector<double> offset_a(n * n), offset_b(n * n);
    unit_a_.resize(n * n);
    unit_b_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double xi = std::sqrt(2.0) * rule_.nodes[i];
        const double xj = std::sqrt(2.0) * rule_.nodes[j];
        pair_weights_[i * n + j] = rule_.weights[i] * rule_.weights[j];
        unit_a_[i * n + j] = l11_ * xi;
        unit_b_[i * n + j] = l21_ * xi + l22_ * xj;
      }
    }
  }

  complex full(double omega_a, double omega_b) const {
    const Wavenumbers k = wavenumbers(omega_a, omega_b);
    const double ca = omega_a / kSpeedOfLight * std::sin(collection_.angle_a);
    const double cb = -omega_b / kSpeedOfLight * std::sin(collection_.angle_b);
    const double ha = 0.5 * wa2_ * ca;
    const double hb = 0.5 * wb2_ * cb;
    const double mu_a = (m22_ * ha - m12_ * hb) / det_;
    const double mu_b = (-m12_ * ha + m11_ * hb) / det_;
    const double overlap =
        std::exp(0.5 * (ha * mu_a + hb * mu_b) - 0.25 * (wa2_ * ca * ca + wb2_ * cb * cb));

    const double half_length = 0.5 * crystal_.length;
    const std::size_t m = pair_weights_.size();
    thread_local std::vector<double> phase_x, phase_y;
    thread_local std::vector<complex> rot_x, rot_y;
    phase_x.resize(m);
    phase_y.resize(m);
    rot_x.resize(m);
    rot_y.resize(m);
    auto transverse = [&](double a, double b) {
      const double s = a + b;
      return -s * s / (2 * k.pump) + a * a / (2 * k.a) + b * b / (2 * k.b);
    };
    for (std::size_t p = 0; p < m; ++p) {
      phase_x[p] = (k.mismatch + transverse(mu_a + unit_a_[p], mu_b + unit_b_[p])) * half_length;
      phase_y[p] = transverse(unit_a_[p], unit_b_[p]) * half_length;
      rot_x[p] = std::polar(pair_weights_[p], phase_x[p]);
      rot_y[p] = std::polar(pair_weights_[p], phase_y[p]);
    }
    complex total{0.0, 0.0};
    for (std::size_t p = 0; p < m; ++p) {
      complex row{0.0, 0.0};
      const double unit_scale = 1.0 / pair_weights_[p];
      for (std::size_t r = 0; r < m; ++r) {
        const double phi = phase_x[p] + phase_y[r];
        const complex e = rot_x[p] * rot_y[r];  // weights * exp(i phi)
        if (std::abs(phi) >= 1e-3) {
          const double sin_phi = e.imag() * unit_scale / pair_weights_[r];
          row += e * (sin_phi / phi);
        } else {
          row += e * sinc_small(phi);
        }
      }
      total += row;
    }
    return pump_envelope(omega_a + omega_b, pump_) * (overlap * prefactor_) * total;
  }

  complex central(double omega_a, double omega_b) const {
    const TransverseWavevector qa{omega_a / kSpeedOfLight * std::sin(collection_.angle_a), 0.0};
    const TransverseWavevector qb{-omega_b / kSpeedOfLight * std::sin(collection_.angle_b), 0.0};
    const double qp = qa.x + qb.x;
    const double pump_profile =
        std::exp(-qp * qp * pump_.waist_radius * pump_.waist_radius / 4.0);
    const double phi = longitudinal_mismatch(omega_a, omega_b, qa, qb, crystal_) *
                       0.5 * crystal_.length;
    const double sinc = std::abs(phi) < 1e-3 ? sinc_small(phi) : std::sin(phi) / phi;
    return pump_envelope(omega_a + omega_b, pump_) * pump_profile * sinc * std::polar(1.0, phi);
  }

 private:
  struct Wavenumbers {
    double pump, a, b, mismatch;
  };

  Wavenumbers wavenumbers(double omega_a, double omega_b) const {
    const double omega_p = omega_a + omega_b;
    Wavenumbers k;
    k.pump = extraordinary_index(crystal_, wavelength_from_omega(omega_p), crystal_.cut_angle) *
             omega_p / kSpeedOfLight;
    k.a = ordinary_index(crystal_, wavelength_from_omega(omega_a)) * omega_a / kSpeedOfLight;
    k.b = ordinary_index(crystal_, wavelength_from_omega(omega_b)) * omega_b / kSpeedOfLight;
    k.mismatch = k.pump - k.a - k.b;
    return k;
  }

  const CrystalSpec& crystal_;
  const PumpSpec& pump_;
  const CollectionSpec& collection_;
  GaussHermiteRule rule_;
  double wa2_, wb2_;
  double m11_, m12_, m22_, det_;
  double l11_, l21_, l22_;
  double prefactor_;
  std::vector<double> pair_weights_;
  std::vector<double> unit_a_, unit_b_;
};

void validate_all(const CrystalSpec& crystal, const PumpSpec& pump,
                  const CollectionSpec& collection) {
  crystal.validate();
  pump.validate();
  collection.validate();
}

}  // namespace

double SellmeierBranch::index(double wavelength) const {
  const double l2 = (wavelength * 1e6) * (wavelength * 1e6);
  const double n2 = a + b / (l2 - c) - d * l2;
  if (!(n2 > 1.0)) throw DomainError("Sellmeier branch gives n <= 1 at " + nm_string(wavelength));
  return std::sqrt(n2);
}

SellmeierSet SellmeierSet::bbo_eimerl_1987() {
  SellmeierSet set;
  set.name = "BBO-Eimerl-1987";
  set.source = "D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987)";
  set.ordinary = {2.7405, 0.0184, 0.0179, 0.0155};
  set.extraordinary = {2.3730, 0.0128, 0.0156, 0.0044};
  return set;
}

void CrystalSpec::validate() const {
  if (!(length > 0.0)) throw DomainError("crystal length must be positive");
  if (!(cut_angle > 0.0 && cut_angle < kPi / 2))
    throw DomainError("crystal cut angle must lie in (0, 90) degrees");
  if (!(sellmeier.min_wavelength > 0.0 && sellmeier.max_wavelength > sellmeier.min_wavelength))
    throw DomainError("Sellmeier band must be positive and increasing");
  // Both branches must stay above 1 across the band.
  for (int i = 0; i <= 70; ++i) {
    const double l = sellmeier.min_wavelength +
                     (sellmeier.max_wavelength - sellmeier.min_wavelength) * i / 70.0;
    sellmeier.ordinary.index(l);
    sellmeier.extraordinary.index(l);
  }
}

double PumpSpec::spectral_fwhm() const { return 4.0 * std::log(2.0) / duration_fwhm; }

void PumpSpec::validate() const {
  if (!(center_wavelength > 0.0 && duration_fwhm > 0.0 && waist_radius > 0.0 &&
        average_power > 0.0 && rep_rate > 0.0))
    throw DomainError("pump parameters must be strictly positive");
}

void CollectionSpec::validate() const {
  const double max_angle = degrees(10.0);
  if (!(angle_a > 0.0 && angle_a < max_angle && angle_b > 0.0 && angle_b < max_angle))
    throw DomainError("collection angles must lie in (0, 10) degrees");
  if (!(fiber_waist_a > 0.0 && fiber_waist_b > 0.0))
    throw DomainError("fiber mode waists must be positive");
}

QuadratureConvergenceError::QuadratureConvergenceError(int order, double value,
                                                       double value_doubled)
    : NumericError([&] {
        std::ostringstream s;
        s.precision(17);
        s << "quadrature not converged: peak intensity " << value << " at order " << order
          << " vs " << value_doubled << " at order " << 2 * order;
        return s.str();
      }()),
      order_(order),
      value_(value),
      value_doubled_(value_doubled) {}

double ordinary_index(const CrystalSpec& crystal, double wavelength) {
  check_band(crystal.sellmeier, wavelength);
  return crystal.sellmeier.ordinary.index(wavelength);
}

double extraordinary_index(const CrystalSpec& crystal, double wavelength, double theta) {
  check_band(crystal.sellmeier, wavelength);
  if (!(theta >= 0.0 && theta <= kPi / 2))
    throw DomainError("propagation angle must lie in [0, 90] degrees");
  const double no = crystal.sellmeier.ordinary.index(wavelength);
  const double ne = crystal.sellmeier.extraordinary.index(wavelength);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

complex pump_envelope(double omega_sum, const PumpSpec& pump) {
  if (!(omega_sum > 0.0)) throw DomainError("pump envelope needs a positive frequency");
  const double detuning = omega_sum - pump.center_omega();
  const double t = pump.duration_fwhm;
  return {std::exp(-detuning * detuning * t * t / (8.0 * std::log(2.0))), 0.0};
}

double longitudinal_mismatch(double omega_a, double omega_b, TransverseWavevector q_a,
                             TransverseWavevector q_b, const CrystalSpec& crystal) {
  if (!(omega_a > 0.0 && omega_b > 0.0)) throw DomainError("frequencies must be positive");
  const double omega_p = omega_a + omega_b;
  const double kp = extraordinary_index(crystal, wavelength_from_omega(omega_p), crystal.cut_angle) *
                    omega_p / kSpeedOfLight;
  const double ka = ordinary_index(crystal, wavelength_from_omega(omega_a)) * omega_a / kSpeedOfLight;
  const double kb = ordinary_index(crystal, wavelength_from_omega(omega_b)) * omega_b / kSpeedOfLight;
  const double qa2 = q_a.x * q_a.x + q_a.y * q_a.y;
  const double qb2 = q_b.x * q_b.x + q_b.y * q_b.y;
  const double qpx = q_a.x + q_b.x;
  const double qpy = q_a.y + q_b.y;
  const double qp2 = qpx * qpx + qpy * qpy;
  if (qa2 > 0.04 * ka * ka || qb2 > 0.04 * kb * kb || qp2 > 0.04 * kp * kp)
    throw DomainError("transverse wavevector outside the paraxial domain (|q| > 0.2 k)");
  return (kp - qp2 / (2 * kp)) - (ka - qa2 / (2 * ka)) - (kb - qb2 / (2 * kb));
}

double collinear_phase_matched_omega(const CrystalSpec& crystal, double omega_pump) {
  crystal.validate();
  struct Params {
    const CrystalSpec* crystal;
    double omega_pump;
  } params{&crystal, omega_pump};
  gsl_function f;
  f.function = [](double omega_a, void* p) {
    auto* prm = static_cast<Params*>(p);
    return longitudinal_mismatch(omega_a, prm->omega_pump - omega_a, {}, {}, *prm->crystal);
  };
  f.params = &params;
  // Signal stays in band and its conjugate too.
  const double lo = std::max(omega_from_wavelength(crystal.sellmeier.max_wavelength),
                             omega_pump - omega_from_wavelength(crystal.sellmeier.min_wavelength));
  const double hi = 0.5 * omega_pump;
  if (!(lo < hi)) throw DomainError("pump frequency leaves no in-band signal range");
  const double f_lo = f.function(lo, &params);
  const double f_hi = f.function(hi, &params);
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi))
    throw DomainError("no collinear phase matching for this cut angle and pump");

  gsl_error_handler_t* old_handler = gsl_set_error_handler_off();
  std::unique_ptr<gsl_root_fsolver, decltype(&gsl_root_fsolver_free)> solver(
      gsl_root_fsolver_alloc(gsl_root_fsolver_brent), &gsl_root_fsolver_free);
  gsl_root_fsolver_set(solver.get(), &f, lo, hi);
  double root = 0.5 * (lo + hi);
  int status = GSL_CONTINUE;
  for (int iter = 0; iter < 200 && status == GSL_CONTINUE; ++iter) {
    gsl_root_fsolver_iterate(solver.get());
    root = gsl_root_fsolver_root(solver.get());
    status = gsl_root_test_interval(gsl_root_fsolver_x_lower(solver.get()),
                                    gsl_root_fsolver_x_upper(solver.get()), 0.0, 1e-15);
  }
  gsl_set_error_handler(old_handler);
  if (status != GSL_SUCCESS) throw NumericError("collinear phase-matching search did not converge");
  return root;
}

complex joint_amplitude_at(double omega_a, double omega_b, const CrystalSpec& crystal,
                           const PumpSpec& pump, const CollectionSpec& collection,
                           const QuadratureSpec& quadrature) {
  validate_all(crystal, pump, collection);
  if (quadrature.order < 4) throw DomainError("quadrature order must be at least 4");
  AmplitudeIntegral integral(crystal, pump, collection, quadrature.order);
  return quadrature.central_plane_wave_only ? integral.central(omega_a, omega_b)
                                            : integral.full(omega_a, omega_b);
}

JointAmplitude joint_amplitude(const SpectralGrid& grid, const CrystalSpec& crystal,
                               const PumpSpec& pump, const CollectionSpec& collection,
                               const QuadratureSpec& quadrature) {
  validate_all(crystal, pump, collection);
  grid.validate();
  if (grid.quantity != SpectralQuantity::AngularFrequency)
    throw DomainError("joint amplitude needs an angular-frequency grid");
  if (quadrature.order < 4) throw DomainError("quadrature order must be at least 4");

  const AmplitudeIntegral integral(crystal, pump, collection, quadrature.order);
  JointAmplitude out{grid, Array2D<complex>(grid.a.size, grid.b.size)};
  parallel_for(grid.a.size, quadrature.workers, [&](std::size_t i) {
    const double wa = grid.a.at(i);
    for (std::size_t j = 0; j < grid.b.size; ++j) {
      const double wb = grid.b.at(j);
      out.amplitude(i, j) =
          quadrature.central_plane_wave_only ? integral.central(wa, wb) : integral.full(wa, wb);
    }
  });

  if (quadrature.check_convergence && !quadrature.central_plane_wave_only) {
    std::size_t peak = 0;
    const auto values = out.amplitude.values();
    for (std::size_t k = 1; k < values.size(); ++k)
      if (std::norm(values[k]) > std::norm(values[peak])) peak = k;
    const std::size_t i = peak / grid.b.size;
    const std::size_t j = peak % grid.b.size;
    const AmplitudeIntegral doubled(crystal, pump, collection, 2 * quadrature.order);
    const double base = std::norm(values[peak]);
    const double refined = std::norm(doubled.full(grid.a.at(i), grid.b.at(j)));
    if (!(std::abs(refined - base) <= quadrature.convergence_tolerance * std::abs(refined)))
      throw QuadratureConvergenceError(quadrature.order, base, refined);
  }
  return out;
}

JointSpectrum joint_intensity(const JointAmplitude& amplitude, bool normalize) {
  JointSpectrum out{amplitude.grid,
                    Array2D<double>(amplitude.amplitude.rows(), amplitude.amplitude.cols())};
  const auto src = amplitude.amplitude.values();
  auto dst = out.intensity.values();
  double peak = 0.0;
  for (std::size_t k = 0; k < src.size(); ++k) {
    dst[k] = std::norm(src[k]);
    peak = std::max(peak, dst[k]);
  }
  if (normalize && peak > 0.0)
    for (double& v : dst) v /= peak;
  return out;
}

}  // namespace cfts::spdc
