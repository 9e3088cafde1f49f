#include "cfts/interferometer.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace cfts::interf {

namespace {

constexpr double kMaxExactCount = 9007199254740992.0;  // 2^53

std::string fs_string(double seconds) {
  std::ostringstream s;
  s.precision(6);
  s << seconds * 1e15 << " fs";
  return s.str();
}

std::size_t even_ceil(double x) {
  auto n = static_cast<std::size_t>(std::ceil(x - 1e-9));
  n = std::max<std::size_t>(n, 2);
  return n + (n % 2);
}

struct Corner {
  double a, b;
};

std::array<Corner, 4> band_corners(const SpectralBand& band) {
  return {{{band.a_min(), band.b_min()},
           {band.a_min(), band.b_max()},
           {band.a_max(), band.b_min()},
           {band.a_max(), band.b_max()}}};
}

// Integer direction (p, q), |p|, |q| <= 12, closest to the given angle.
std::pair<int, int> rational_direction(double angle) {
  std::pair<int, int> best{1, 0};
  double best_err = std::abs(angle);
  for (int p = 0; p <= 12; ++p)
    for (int q = 0; q <= 12; ++q) {
      if ((p == 0 && q == 0) || std::gcd(p, q) != 1) continue;
      const double err = std::abs(std::atan2(q, p) - angle);
      if (err < best_err - 1e-15) {
        best_err = err;
        best = {p, q};
      }
    }
  return best;
}

void check_separation(const ScanRequirements& req) {
  if (!(req.joint_u_min > req.marginal_u_max)) {
    std::ostringstream s;
    s << "band too wide: joint term starts at " << req.joint_u_min * 1e-15
      << " rad/fs along the fine axis but the axis terms reach " << req.marginal_u_max * 1e-15
      << " rad/fs";
    throw DomainError(s.str());
  }
}

}  // namespace

void SpectralBand::validate() const {
  if (!(bandwidth_a > 0.0 && bandwidth_b > 0.0))
    throw DomainError("spectral band widths must be positive");
  if (!(a_min() > 0.0 && b_min() > 0.0))
    throw DomainError("spectral band must lie at positive frequencies");
}

SpectralBand SpectralBand::covering(const SpectralGrid& grid) {
  grid.validate();
  if (grid.quantity != SpectralQuantity::AngularFrequency)
    throw DomainError("band needs an angular-frequency grid");
  const double a0 = grid.a.start - 0.5 * grid.a.step;
  const double a1 = grid.a.back() + 0.5 * grid.a.step;
  const double b0 = grid.b.start - 0.5 * grid.b.step;
  const double b1 = grid.b.back() + 0.5 * grid.b.step;
  return {0.5 * (a0 + a1), 0.5 * (b0 + b1), a1 - a0, b1 - b0};
}

double ScanPlan::tau_a(std::size_t iu, std::size_t iv) const {
  return origin_a + static_cast<double>(iu) * du * std::cos(rotation) -
         static_cast<double>(iv) * dv * std::sin(rotation);
}

double ScanPlan::tau_b(std::size_t iu, std::size_t iv) const {
  return origin_b + static_cast<double>(iu) * du * std::sin(rotation) +
         static_cast<double>(iv) * dv * std::cos(rotation);
}

void ScanPlan::validate() const {
  if (!(du > 0.0 && dv > 0.0)) throw DomainError("scan steps must be positive");
  if (n_u < 2 || n_v < 2) throw DomainError("scan needs at least 2 points per axis");
  if (!std::isfinite(rotation) || !std::isfinite(origin_a) || !std::isfinite(origin_b))
    throw DomainError("scan geometry must be finite");
}

void DetectionSpec::validate() const {
  if (!(dwell > 0.0)) throw DomainError("dwell must be positive");
  if (!(pair_rate_scale >= 0.0 && dark_coinc_rate >= 0.0))
    throw DomainError("rates must be nonnegative");
  if (!(visibility >= 0.0 && visibility <= 1.0))
    throw DomainError("visibility must lie in [0, 1]");
}

void Interferogram::validate() const {
  plan.validate();
  if (counts.rows() != plan.n_u || counts.cols() != plan.n_v)
    throw DomainError("interferogram shape does not match its plan");
  for (double c : counts.values()) {
    if (!(std::isfinite(c) && c >= 0.0)) throw DomainError("counts must be finite and >= 0");
    if (kind == CountKind::Sampled && c != std::floor(c))
      throw DomainError("sampled counts must be integers");
  }
}

double coincidence_probability(const JointSpectrum& spectrum, double tau_a, double tau_b,
                               double visibility) {
  spectrum.validate();
  if (!std::isfinite(tau_a) || !std::isfinite(tau_b)) throw DomainError("delays must be finite");
  const auto& g = spectrum.grid;
  std::vector<double> cb(g.b.size);
  for (std::size_t j = 0; j < g.b.size; ++j)
    cb[j] = 1.0 + visibility * std::cos(g.b.at(j) * tau_b);
  double total = 0.0;
  for (std::size_t i = 0; i < g.a.size; ++i) {
    const double ca = 1.0 + visibility * std::cos(g.a.at(i) * tau_a);
    double row = 0.0;
    for (std::size_t j = 0; j < g.b.size; ++j) row += spectrum.intensity(i, j) * cb[j];
    total += ca * row;
  }
  return 0.25 * total * g.cell_area();
}

CoincidenceModel::CoincidenceModel(const JointSpectrum& spectrum, double visibility)
    : s_(spectrum.intensity), visibility_(visibility), cell_(spectrum.grid.cell_area()) {
  spectrum.validate();
  const auto& g = spectrum.grid;
  omega_a_.resize(g.a.size);
  omega_b_.resize(g.b.size);
  for (std::size_t i = 0; i < g.a.size; ++i) omega_a_[i] = g.a.at(i);
  for (std::size_t j = 0; j < g.b.size; ++j) omega_b_[j] = g.b.at(j);
  row_sums_.assign(g.a.size, 0.0);
  col_sums_.assign(g.b.size, 0.0);
  for (std::size_t i = 0; i < g.a.size; ++i)
    for (std::size_t j = 0; j < g.b.size; ++j) {
      row_sums_[i] += s_(i, j);
      col_sums_[j] += s_(i, j);
    }
  total_ = std::accumulate(row_sums_.begin(), row_sums_.end(), 0.0);
  zero_delay_ = total_ * cell_;
}

double CoincidenceModel::operator()(double tau_a, double tau_b) const {
  thread_local std::vector<double> cb;
  cb.resize(omega_b_.size());
  double sum_b = 0.0;
  for (std::size_t j = 0; j < omega_b_.size(); ++j) {
    cb[j] = visibility_ * std::cos(omega_b_[j] * tau_b);
    sum_b += cb[j] * col_sums_[j];
  }
  double sum_a = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < omega_a_.size(); ++i) {
    const double ca = visibility_ * std::cos(omega_a_[i] * tau_a);
    sum_a += ca * row_sums_[i];
    const auto row = s_.row(i);
    double r = 0.0;
    for (std::size_t j = 0; j < cb.size(); ++j) r += row[j] * cb[j];
    cross += ca * r;
  }
  return 0.25 * (total_ + sum_a + sum_b + cross) * cell_;
}

double fringe_rotation(double omega_a0, double omega_b0) {
  if (!(omega_a0 > 0.0 && omega_b0 >= 0.0)) throw DomainError("centre frequencies must be positive");
  return std::atan2(omega_b0, omega_a0);
}

double fringe_nyquist_step(double omega_a0, double omega_b0) {
  const double norm = std::hypot(omega_a0, omega_b0);
  if (!(norm > 0.0)) throw DomainError("centre frequencies must not both vanish");
  return kPi / norm;
}

ScanRequirements scan_requirements(const SpectralBand& band, double rotation,
                                   double oversampling, int resolution_divisions,
                                   bool resolve_marginal_terms) {
  band.validate();
  if (!(oversampling >= 1.0)) throw DomainError("oversampling must be >= 1");
  if (resolution_divisions < 1) throw DomainError("resolution divisions must be >= 1");
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  double u_max = std::hypot(band.center_a, band.center_b);
  double u_min = std::numeric_limits<double>::infinity();
  double v_extent = 0.0;
  for (const auto& k : band_corners(band)) {
    const double u = k.a * c + k.b * s;
    u_max = std::max(u_max, u);
    u_min = std::min(u_min, u);
    v_extent = std::max(v_extent, std::abs(-k.a * s + k.b * c));
  }
  const double marginal_u = std::max(band.a_max() * std::abs(c), band.b_max() * std::abs(s));
  if (resolve_marginal_terms)
    v_extent = std::max({v_extent, band.a_max() * std::abs(s), band.b_max() * std::abs(c)});

  ScanRequirements req;
  req.rotation = rotation;
  req.du_max = kPi / (oversampling * u_max);
  req.dv_max = v_extent > 0.0 ? kPi / (oversampling * v_extent)
                              : std::numeric_limits<double>::infinity();
  req.min_length =
      2.0 * kPi / (std::min(band.bandwidth_a, band.bandwidth_b) / resolution_divisions);
  req.joint_u_min = u_min;
  req.marginal_u_max = marginal_u;
  return req;
}

void check_delay_range(const ScanPlan& plan, const DelayRange& range) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t iu : {std::size_t{0}, plan.n_u - 1})
    for (std::size_t iv : {std::size_t{0}, plan.n_v - 1}) {
      for (double t : {plan.tau_a(iu, iv), plan.tau_b(iu, iv)}) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    }
  const double slack = 1e-9 * (range.max - range.min);
  if (lo < range.min - slack || hi > range.max + slack) {
    throw DomainError("scan needs delays from " + fs_string(lo) + " to " + fs_string(hi) +
                      " but the available delay range is " + fs_string(range.min) + " to " +
                      fs_string(range.max));
  }
}

ScanPlan plan_scan(const SpectralBand& band, const PlanOptions& options) {
  band.validate();
  if (options.matched_spacing < 0.0) throw DomainError("matched spacing must be >= 0");
  const double natural = fringe_rotation(band.center_a, band.center_b);

  ScanPlan plan;
  plan.band = band;
  double length = 0.0;
  if (options.matched_spacing > 0.0) {
    const auto [p, q] = rational_direction(natural);
    plan.rotation = std::atan2(q, p);
    plan.matched_spacing = options.matched_spacing;
  } else {
    plan.rotation = natural;
  }
  const ScanRequirements req =
      scan_requirements(band, plan.rotation, options.oversampling, options.resolution_divisions,
                        options.resolve_marginal_terms);
  check_separation(req);

  if (options.matched_spacing > 0.0) {
    const auto [p, q] = rational_direction(natural);
    const double period = 2.0 * kPi * std::hypot(p, q) / options.matched_spacing;
    const double m = std::max(1.0, std::ceil(req.min_length / period - 1e-9));
    length = m * period;
  } else {
    length = req.min_length;
  }

  auto axis = [&](std::optional<std::size_t> fixed, double dmax, const char* name,
                  std::size_t& n, double& d) {
    if (fixed) {
      if (*fixed < 2) throw DomainError(std::string(name) + " must be at least 2");
      n = *fixed;
      d = length / static_cast<double>(n);
      if (d > dmax * (1 + 1e-12)) {
        std::ostringstream s;
        s << name << " = " << n << " gives step " << fs_string(d) << " above the limit "
          << fs_string(dmax) << "; at least " << even_ceil(length / dmax) << " points needed";
        throw DomainError(s.str());
      }
    } else {
      n = even_ceil(length / dmax);
      d = length / static_cast<double>(n);
    }
  };
  axis(options.n_u, req.du_max, "n_u", plan.n_u, plan.du);
  axis(options.n_v, req.dv_max, "n_v", plan.n_v, plan.dv);

  const double c = std::cos(plan.rotation);
  const double s = std::sin(plan.rotation);
  const double hu = static_cast<double>(plan.n_u / 2) * plan.du;
  const double hv = static_cast<double>(plan.n_v / 2) * plan.dv;
  plan.origin_a = -hu * c + hv * s;
  plan.origin_b = -hu * s - hv * c;
  check_delay_range(plan, options.range);
  return plan;
}

ScanPlan mesh_plan(const SpectralBand& band, std::size_t n_u, std::size_t n_v, double du,
                   double dv, std::optional<double> rotation) {
  band.validate();
  ScanPlan plan;
  plan.band = band;
  plan.rotation = rotation ? *rotation : fringe_rotation(band.center_a, band.center_b);
  plan.n_u = n_u;
  plan.n_v = n_v;
  plan.du = du;
  plan.dv = dv;
  const double c = std::cos(plan.rotation);
  const double s = std::sin(plan.rotation);
  const double hu = static_cast<double>(n_u / 2) * du;
  const double hv = static_cast<double>(n_v / 2) * dv;
  plan.origin_a = -hu * c + hv * s;
  plan.origin_b = -hu * s - hv * c;
  plan.validate();
  return plan;
}

ScanPlan plan_scan(double omega_a0, double omega_b0, double bandwidth_a, double bandwidth_b,
                   double oversampling) {
  PlanOptions options;
  options.oversampling = oversampling;
  return plan_scan(SpectralBand{omega_a0, omega_b0, bandwidth_a, bandwidth_b}, options);
}

PlanCheck check_plan(const ScanPlan& plan, double oversampling, const DelayRange& range,
                     int resolution_divisions) {
  plan.validate();
  const ScanRequirements req =
      scan_requirements(plan.band, plan.rotation, oversampling, resolution_divisions);
  if (plan.du > req.du_max * (1 + 1e-12))
    throw DomainError("fine step " + fs_string(plan.du) + " exceeds the fringe Nyquist limit " +
                      fs_string(req.du_max));
  if (plan.dv > req.dv_max * (1 + 1e-12))
    throw DomainError("coarse step " + fs_string(plan.dv) + " exceeds the limit " +
                      fs_string(req.dv_max) + " set by the band extent along the fringes");
  check_separation(req);
  check_delay_range(plan, range);

  PlanCheck out;
  const double lu = plan.du * static_cast<double>(plan.n_u);
  const double lv = plan.dv * static_cast<double>(plan.n_v);
  if (lu < req.min_length * (1 - 1e-9) || lv < req.min_length * (1 - 1e-9)) {
    out.resolution_ok = false;
    std::ostringstream s;
    s << "scan lengths " << fs_string(lu) << " x " << fs_string(lv)
      << " resolve less than bandwidth/" << resolution_divisions << " (needs "
      << fs_string(req.min_length) << ")";
    out.warnings.push_back(s.str());
  }
  return out;
}

namespace {

// Returns false when the mean is beyond the exact integer range.
bool detected_count(double q, const DetectionSpec& d, bool sampled, std::size_t iu, std::size_t iv,
                    double& value) {
  const double mean = d.dwell * (d.pair_rate_scale * q + d.dark_coinc_rate);
  if (!(mean <= kMaxExactCount)) return false;
  value = mean;
  if (sampled) {
    if (mean > 0.0) {
      SplitMix64 rng(mix_seed(mix_seed(d.rng_seed, iu), iv));
      std::poisson_distribution<long long> draw(mean);
      value = static_cast<double>(draw(rng));
    } else {
      value = 0.0;
    }
  }
  return true;
}

void throw_overflow(const std::vector<int>& overflow) {
  if (std::any_of(overflow.begin(), overflow.end(), [](int f) { return f != 0; }))
    throw NumericError("expected counts exceed the exactly representable integer range (2^53)");
}

}  // namespace

Array2D<double> relative_coincidence(const JointSpectrum& spectrum, const ScanPlan& plan,
                                     double visibility, unsigned workers) {
  plan.validate();
  const CoincidenceModel model(spectrum, visibility);
  const double norm = model.zero_delay();
  if (!(norm > 0.0)) throw NumericError("spectrum has zero total weight");
  Array2D<double> out(plan.n_u, plan.n_v);
  parallel_for(plan.n_u, workers, [&](std::size_t iu) {
    for (std::size_t iv = 0; iv < plan.n_v; ++iv)
      out(iu, iv) = std::max(0.0, model(plan.tau_a(iu, iv), plan.tau_b(iu, iv))) / norm;
  });
  return out;
}

Interferogram detect(const ScanPlan& plan, const Array2D<double>& relative,
                     const DetectionSpec& detection, bool sampled) {
  plan.validate();
  detection.validate();
  if (relative.rows() != plan.n_u || relative.cols() != plan.n_v)
    throw DomainError("coincidence grid does not match the scan plan");
  Interferogram out;
  out.plan = plan;
  out.detection = detection;
  out.kind = sampled ? CountKind::Sampled : CountKind::Expected;
  out.counts = Array2D<double>(plan.n_u, plan.n_v);
  std::vector<int> overflow(plan.n_u, 0);
  for (std::size_t iu = 0; iu < plan.n_u; ++iu)
    for (std::size_t iv = 0; iv < plan.n_v; ++iv)
      if (!detected_count(relative(iu, iv), detection, sampled, iu, iv, out.counts(iu, iv)))
        overflow[iu] = 1;
  throw_overflow(overflow);
  return out;
}

Array2D<double> synthesize_region(const JointSpectrum& spectrum, const ScanPlan& plan,
                                  const DetectionSpec& detection, bool sampled,
                                  std::size_t u_begin, std::size_t u_end, std::size_t v_begin,
                                  std::size_t v_end, unsigned workers) {
  plan.validate();
  detection.validate();
  if (!(u_begin <= u_end && u_end <= plan.n_u && v_begin <= v_end && v_end <= plan.n_v))
    throw DomainError("region outside the scan plan");
  const CoincidenceModel model(spectrum, detection.visibility);
  const double norm = model.zero_delay();
  if (!(norm > 0.0)) throw NumericError("spectrum has zero total weight");

  Array2D<double> out(u_end - u_begin, v_end - v_begin);
  std::vector<int> overflow(u_end - u_begin, 0);
  parallel_for(u_end - u_begin, workers, [&](std::size_t r) {
    const std::size_t iu = u_begin + r;
    for (std::size_t iv = v_begin; iv < v_end; ++iv) {
      const double q = std::max(0.0, model(plan.tau_a(iu, iv), plan.tau_b(iu, iv))) / norm;
      if (!detected_count(q, detection, sampled, iu, iv, out(r, iv - v_begin))) {
        overflow[r] = 1;
        return;
      }
    }
  });
  throw_overflow(overflow);
  return out;
}

Interferogram synthesize(const JointSpectrum& spectrum, const ScanPlan& plan,
                         const DetectionSpec& detection, bool sampled, unsigned workers) {
  Interferogram out;
  out.plan = plan;
  out.detection = detection;
  out.kind = sampled ? CountKind::Sampled : CountKind::Expected;
  out.counts = synthesize_region(spectrum, plan, detection, sampled, 0, plan.n_u, 0, plan.n_v,
                                 workers);
  return out;
}

}  // namespace cfts::interf
