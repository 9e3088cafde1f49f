#include "cfts/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fft.hpp"

namespace cfts::recon {

namespace {

std::size_t wrap(long k, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

std::vector<double> make_window(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::RaisedCosine)
    for (std::size_t i = 0; i < n; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

void add_scaled(LinearForm& out, const LinearForm& in, double factor) {
  for (const auto& [k, w] : in) out.emplace_back(k, w * factor);
}

LinearForm merged(LinearForm form) {
  std::sort(form.begin(), form.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  LinearForm out;
  for (const auto& [k, w] : form) {
    if (!out.empty() && out.back().first == k)
      out.back().second += w;
    else
      out.emplace_back(k, w);
  }
  return out;
}

// Geometry shared by the region masks and the axis-term readouts.
struct AxisLines {
  double c, s;        // cos, sin of the rotation
  double du, dv;      // bin spacings
  std::size_t n_u, n_v;
  double h;           // half-width in v bins

  // v position (bins, unwrapped) of the Omega_B = 0 line in column k.
  double line_a(long k) const { return -static_cast<double>(k) * du * s / (c * dv); }
  // v position of the Omega_A = 0 line in column k.
  double line_b(long k) const { return static_cast<double>(k) * du * c / (s * dv); }

  // Integer v bins within h of a line position, unwrapped.
  std::pair<long, long> v_span(double line) const {
    return {static_cast<long>(std::ceil(line - h - 1e-9)),
            static_cast<long>(std::floor(line + h + 1e-9))};
  }

  bool near(long sv, double line) const {
    double d = static_cast<double>(sv) - line;
    const double n = static_cast<double>(n_v);
    d -= n * std::round(d / n);
    return std::abs(d) <= h + 1e-9 || n - std::abs(d) <= h + 1e-9;
  }
};

struct ColumnRange {
  long lo = 1, hi = 0;  // positive columns; the mirror covers [-hi, -lo]
  bool contains(long k) const {
    return (k >= lo && k <= hi) || (-k >= lo && -k <= hi);
  }
};

}  // namespace

double FrequencyMap::delta_u() const {
  return 2.0 * kPi / (static_cast<double>(plan.n_u) * plan.du);
}

double FrequencyMap::delta_v() const {
  return 2.0 * kPi / (static_cast<double>(plan.n_v) * plan.dv);
}

long FrequencyMap::signed_index(std::size_t k, std::size_t n) {
  return 2 * k < n ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

std::pair<double, double> FrequencyMap::physical(double ku, double kv) const {
  const double wu = ku * delta_u();
  const double wv = kv * delta_v();
  const double c = std::cos(plan.rotation);
  const double s = std::sin(plan.rotation);
  return {wu * c - wv * s, wu * s + wv * c};
}

std::pair<double, double> FrequencyMap::bin_of(double omega_a, double omega_b) const {
  const double c = std::cos(plan.rotation);
  const double s = std::sin(plan.rotation);
  return {(omega_a * c + omega_b * s) / delta_u(), (-omega_a * s + omega_b * c) / delta_v()};
}

double FrequencyMap::coherent_gain() const {
  double gu = 0.0, gv = 0.0;
  for (double w : window_u) gu += w;
  for (double w : window_v) gv += w;
  return gu * gv;
}

Array2D<complex> dft2(const Array2D<double>& values) {
  Array2D<complex> in(values.rows(), values.cols());
  const auto src = values.values();
  auto dst = in.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = src[k];
  return detail::forward_dft2(in);
}

FrequencyMap dft2(const interf::Interferogram& interferogram, Window window, bool detrend) {
  interferogram.validate();
  const auto& plan = interferogram.plan;
  FrequencyMap map;
  map.plan = plan;
  map.window = window;
  map.detrended = detrend;
  map.window_u = make_window(window, plan.n_u);
  map.window_v = make_window(window, plan.n_v);

  double sum = 0.0;
  for (double c : interferogram.counts.values()) sum += c;
  map.count_sum = sum;
  map.mean_removed = detrend ? sum / static_cast<double>(plan.points()) : 0.0;

  Array2D<complex> in(plan.n_u, plan.n_v);
  for (std::size_t iu = 0; iu < plan.n_u; ++iu)
    for (std::size_t iv = 0; iv < plan.n_v; ++iv)
      in(iu, iv) = map.window_u[iu] * map.window_v[iv] *
                   (interferogram.counts(iu, iv) - map.mean_removed);
  map.values = detail::forward_dft2(in);
  return map;
}

Region mirror(Region r) {
  switch (r) {
    case Region::JointSum: return Region::JointSumMirror;
    case Region::JointSumMirror: return Region::JointSum;
    case Region::JointDiff: return Region::JointDiffMirror;
    case Region::JointDiffMirror: return Region::JointDiff;
    default: return r;
  }
}

JointReadout::JointReadout(std::shared_ptr<const FrequencyMap> map) : map_(std::move(map)) {
  scale_ = 16.0 / (map_->coherent_gain() * map_->delta_u() * map_->delta_v());
}

LinearForm JointReadout::form(double omega_a, double omega_b) const {
  const auto& band = map_->plan.band;
  const double slack = 1e-9 * (band.bandwidth_a + band.bandwidth_b);
  if (omega_a < band.a_min() - slack || omega_a > band.a_max() + slack ||
      omega_b < band.b_min() - slack || omega_b > band.b_max() + slack)
    return {};
  const auto [ku, kv] = map_->bin_of(omega_a, omega_b);
  const std::size_t n_u = map_->plan.n_u;
  const std::size_t n_v = map_->plan.n_v;
  if (std::abs(kv) >= 0.5 * static_cast<double>(n_v) || ku <= 0.0 ||
      ku >= 0.5 * static_cast<double>(n_u))
    return {};
  const double fu = std::floor(ku);
  const double fv = std::floor(kv);
  const double tu = ku - fu;
  const double tv = kv - fv;
  const long iu = static_cast<long>(fu);
  const long iv = static_cast<long>(fv);
  LinearForm out;
  const double w[4] = {(1 - tu) * (1 - tv), (1 - tu) * tv, tu * (1 - tv), tu * tv};
  const long du[4] = {0, 0, 1, 1};
  const long dv[4] = {0, 1, 0, 1};
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    out.emplace_back(wrap(iu + du[q], n_u) * n_v + wrap(iv + dv[q], n_v), w[q] * scale_);
  }
  return out;
}

double JointReadout::value(double omega_a, double omega_b) const {
  double v = 0.0;
  const auto values = map_->values.values();
  for (const auto& [k, w] : form(omega_a, omega_b)) v += w * std::abs(values[k]);
  return v;
}

TermDecomposition extract_terms(const FrequencyMap& map, const ExtractOptions& options) {
  if (!(options.dc_radius >= 0.0) || !(options.axis_halfwidth >= 0.0))
    throw ConfigError("dc_radius and axis_halfwidth must be nonnegative");
  const auto& plan = map.plan;
  const std::size_t n_u = plan.n_u;
  const std::size_t n_v = plan.n_v;
  if (map.values.rows() != n_u || map.values.cols() != n_v)
    throw DomainError("frequency map does not match its plan");
  const auto& band = plan.band;
  band.validate();

  AxisLines lines{std::cos(plan.rotation), std::sin(plan.rotation), map.delta_u(), map.delta_v(),
                  n_u, n_v, options.axis_halfwidth};
  if (!(std::abs(lines.c) > 1e-12 && std::abs(lines.s) > 1e-12))
    throw ConfigError("scan axis parallel to a delay axis: an axis term sits on zero frequency");
  if (2.0 * options.axis_halfwidth + 1.0 > static_cast<double>(n_v))
    throw ConfigError("axis_halfwidth wraps around the v axis");

  // Columns each axis term occupies over the band.
  const ColumnRange cols_a{static_cast<long>(std::floor(band.a_min() * lines.c / lines.du)),
                           static_cast<long>(std::ceil(band.a_max() * lines.c / lines.du))};
  const ColumnRange cols_b{static_cast<long>(std::floor(band.b_min() * lines.s / lines.du)),
                           static_cast<long>(std::ceil(band.b_max() * lines.s / lines.du))};

  // Joint footprint rectangle in signed bins.
  double u_lo = std::numeric_limits<double>::infinity(), u_hi = -u_lo;
  double v_lo = u_lo, v_hi = -u_lo;
  for (double a : {band.a_min(), band.a_max()})
    for (double b : {band.b_min(), band.b_max()}) {
      const auto [ku, kv] = map.bin_of(a, b);
      u_lo = std::min(u_lo, ku);
      u_hi = std::max(u_hi, ku);
      v_lo = std::min(v_lo, kv);
      v_hi = std::max(v_hi, kv);
    }
  const long ju_lo = static_cast<long>(std::floor(u_lo)), ju_hi = static_cast<long>(std::ceil(u_hi));
  const long jv_lo = static_cast<long>(std::floor(v_lo)), jv_hi = static_cast<long>(std::ceil(v_hi));
  auto in_joint = [&](long su, long sv) {
    return (su >= ju_lo && su <= ju_hi && sv >= jv_lo && sv <= jv_hi) ||
           (-su >= ju_lo && -su <= ju_hi && -sv >= jv_lo && -sv <= jv_hi);
  };
  const double r2 = options.dc_radius * options.dc_radius;
  auto in_dc = [&](long su, long sv) {
    return static_cast<double>(su * su + sv * sv) <= r2 + 1e-9;
  };

  // Consistency of the regions over the band.
  bool overlap = false;
  auto scan_footprint = [&](const ColumnRange& cols, bool is_a) {
    for (long k = cols.lo; k <= cols.hi; ++k)
      for (long sign : {1L, -1L}) {
        const long su = sign * k;
        const double line = is_a ? lines.line_a(su) : lines.line_b(su);
        const auto [v0, v1] = lines.v_span(line);
        for (long v = v0; v <= v1; ++v) {
          const long sv = FrequencyMap::signed_index(wrap(v, n_v), n_v);
          if (in_dc(su, sv))
            throw ConfigError("DC disc overlaps the " + std::string(is_a ? "A" : "B") +
                              " axis band; reduce dc_radius or axis_halfwidth");
          if (in_joint(su, sv))
            throw ConfigError("axis band overlaps the joint region; reduce axis_halfwidth");
          const ColumnRange& other = is_a ? cols_b : cols_a;
          if (other.contains(su) &&
              lines.near(sv, is_a ? lines.line_b(su) : lines.line_a(su)))
            overlap = true;
        }
      }
  };
  scan_footprint(cols_a, true);
  scan_footprint(cols_b, false);

  TermDecomposition out;
  out.options = options;
  out.dc_weight = map.count_sum;
  out.marginals_overlap = overlap;

  out.regions = Array2D<Region>(n_u, n_v, Region::Dc);
  for (std::size_t iu = 0; iu < n_u; ++iu) {
    const long su = FrequencyMap::signed_index(iu, n_u);
    for (std::size_t iv = 0; iv < n_v; ++iv) {
      const long sv = FrequencyMap::signed_index(iv, n_v);
      Region r;
      if (in_dc(su, sv)) {
        r = Region::Dc;
      } else if (cols_a.contains(su) && lines.near(sv, lines.line_a(su))) {
        r = Region::MarginalA;
      } else if (cols_b.contains(su) && lines.near(sv, lines.line_b(su))) {
        r = Region::MarginalB;
      } else {
        const auto [wa, wb] = map.physical(static_cast<double>(su), static_cast<double>(sv));
        if (wa > 0 && wb >= 0)
          r = Region::JointSum;
        else if (wa <= 0 && wb > 0)
          r = Region::JointDiffMirror;
        else if (wa < 0 && wb <= 0)
          r = Region::JointSumMirror;
        else
          r = Region::JointDiff;
      }
      out.regions(iu, iv) = r;
    }
  }

  // Joint term.
  if (options.joint_grid) {
    options.joint_grid->validate();
    if (options.joint_grid->quantity != SpectralQuantity::AngularFrequency)
      throw ConfigError("joint grid must be in angular frequency");
    out.grid = *options.joint_grid;
  } else {
    const double step = 0.5 * std::min(lines.du, lines.dv);
    auto count = [&](double width) {
      return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(width / step)) + 1, 8,
                                     1024);
    };
    out.grid = {UniformAxis::spanning(band.a_min(), band.a_max(), count(band.bandwidth_a)),
                UniformAxis::spanning(band.b_min(), band.b_max(), count(band.bandwidth_b)),
                SpectralQuantity::AngularFrequency};
  }
  auto shared_map = std::make_shared<const FrequencyMap>(map);
  out.readout = std::make_shared<const JointReadout>(shared_map);
  out.joint = JointSpectrum{out.grid, Array2D<double>(out.grid.a.size, out.grid.b.size)};
  for (std::size_t i = 0; i < out.grid.a.size; ++i)
    for (std::size_t j = 0; j < out.grid.b.size; ++j)
      out.joint.intensity(i, j) = out.readout->value(out.grid.a.at(i), out.grid.b.at(j));

  // Axis terms: sum complex bins across the band in each column, phase
  // referenced to the scan row through zero delay, then interpolate the
  // modulus between columns.
  const double v_origin = -plan.origin_a * lines.s + plan.origin_b * lines.c;
  const double j0 = -v_origin / plan.dv;
  const std::size_t j0_index = std::min<std::size_t>(
      n_v - 1, static_cast<std::size_t>(std::max(0.0, std::round(j0))));
  double gain_u = 0.0;
  for (double w : map.window_u) gain_u += w;
  const double norm =
      static_cast<double>(n_v) * map.window_v[j0_index] * gain_u * lines.du;
  auto column_sum = [&](long su, bool is_a) {
    const double line = is_a ? lines.line_a(su) : lines.line_b(su);
    const auto [v0, v1] = lines.v_span(line);
    complex total{0.0, 0.0};
    const std::size_t iu = wrap(su, n_u);
    for (long v = v0; v <= v1; ++v) {
      const double phase = 2.0 * kPi * static_cast<double>(v) * j0 / static_cast<double>(n_v);
      total += map.values(iu, wrap(v, n_v)) * std::polar(1.0, phase);
    }
    return std::abs(total);
  };
  auto marginal = [&](const UniformAxis& axis, bool is_a) {
    std::vector<double> values(axis.size);
    const double proj = is_a ? std::abs(lines.c) : std::abs(lines.s);
    for (std::size_t i = 0; i < axis.size; ++i) {
      const double ku = axis.at(i) * proj / lines.du;
      const double f = std::floor(ku);
      const double t = ku - f;
      const long k = static_cast<long>(f);
      const double m = (1 - t) * column_sum(k, is_a) + t * column_sum(k + 1, is_a);
      values[i] = 8.0 * m * proj / norm;
    }
    return values;
  };
  out.marginal_a = marginal(out.grid.a, true);
  out.marginal_b = marginal(out.grid.b, false);
  return out;
}

namespace {

// Unnormalized value of wavelength node (i, j) and its linear form.
LinearForm wavelength_node_form(const WavelengthMap& map, std::size_t i, std::size_t j) {
  const double la = map.spectrum.grid.a.at(i);
  const double lb = map.spectrum.grid.b.at(j);
  const double wa = kTwoPiC / la;
  const double wb = kTwoPiC / lb;
  const double jac = map.jacobian ? (kTwoPiC / (la * la)) * (kTwoPiC / (lb * lb)) : 1.0;
  const auto& g = map.source_grid;
  const double fa = g.a.index_of(wa);
  const double fb = g.b.index_of(wb);
  LinearForm out;
  if (fa < -1e-9 || fb < -1e-9 || fa > static_cast<double>(g.a.size - 1) + 1e-9 ||
      fb > static_cast<double>(g.b.size - 1) + 1e-9)
    return out;
  const std::size_t ia = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(fa))), g.a.size - 2);
  const std::size_t ib = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(fb))), g.b.size - 2);
  const double ta = std::clamp(fa - static_cast<double>(ia), 0.0, 1.0);
  const double tb = std::clamp(fb - static_cast<double>(ib), 0.0, 1.0);
  const double w[4] = {(1 - ta) * (1 - tb), (1 - ta) * tb, ta * (1 - tb), ta * tb};
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    const std::size_t na = ia + (q >= 2 ? 1 : 0);
    const std::size_t nb = ib + (q % 2);
    add_scaled(out, map.readout->form(g.a.at(na), g.b.at(nb)), w[q] * jac);
  }
  return out;
}

}  // namespace

WavelengthMap joint_in_wavelength(const TermDecomposition& terms, bool apply_jacobian,
                                  const std::optional<WavelengthGridSpec>& grid) {
  terms.grid.validate();
  if (terms.joint.intensity.rows() != terms.grid.a.size ||
      terms.joint.intensity.cols() != terms.grid.b.size)
    throw DomainError("joint term does not match its grid");
  const auto& g = terms.grid;
  const double la_lo = kTwoPiC / g.a.back(), la_hi = kTwoPiC / g.a.start;
  const double lb_lo = kTwoPiC / g.b.back(), lb_hi = kTwoPiC / g.b.start;
  WavelengthGridSpec spec =
      grid.value_or(WavelengthGridSpec{la_lo, la_hi, g.a.size, lb_lo, lb_hi, g.b.size});
  const double tol = 1e-9;
  if (spec.a_min < la_lo * (1 - tol) || spec.a_max > la_hi * (1 + tol) ||
      spec.b_min < lb_lo * (1 - tol) || spec.b_max > lb_hi * (1 + tol)) {
    std::ostringstream s;
    s << "requested wavelength range " << spec.a_min * 1e9 << "-" << spec.a_max * 1e9 << " x "
      << spec.b_min * 1e9 << "-" << spec.b_max * 1e9 << " nm lies outside the frequency band "
      << la_lo * 1e9 << "-" << la_hi * 1e9 << " x " << lb_lo * 1e9 << "-" << lb_hi * 1e9
      << " nm";
    throw DomainError(s.str());
  }
  if (spec.n_a < 2 || spec.n_b < 2 || !(spec.a_max > spec.a_min) || !(spec.b_max > spec.b_min))
    throw DomainError("wavelength grid needs increasing ranges and at least 2 points");
  spec.a_min = std::max(spec.a_min, la_lo);
  spec.a_max = std::min(spec.a_max, la_hi);
  spec.b_min = std::max(spec.b_min, lb_lo);
  spec.b_max = std::min(spec.b_max, lb_hi);

  WavelengthMap out;
  out.jacobian = apply_jacobian;
  out.source_grid = g;
  out.readout = terms.readout;
  out.spectrum.grid = {UniformAxis::spanning(spec.a_min, spec.a_max, spec.n_a),
                       UniformAxis::spanning(spec.b_min, spec.b_max, spec.n_b),
                       SpectralQuantity::Wavelength};
  out.spectrum.intensity = Array2D<double>(spec.n_a, spec.n_b);
  double peak = 0.0;
  for (std::size_t i = 0; i < spec.n_a; ++i)
    for (std::size_t j = 0; j < spec.n_b; ++j) {
      const double la = out.spectrum.grid.a.at(i);
      const double lb = out.spectrum.grid.b.at(j);
      double v = terms.joint.interpolate(kTwoPiC / la, kTwoPiC / lb);
      if (apply_jacobian) v *= (kTwoPiC / (la * la)) * (kTwoPiC / (lb * lb));
      out.spectrum.intensity(i, j) = v;
      peak = std::max(peak, v);
    }
  if (!(peak > 0.0)) throw NumericError("joint term is zero over the wavelength grid");
  for (double& v : out.spectrum.intensity.values()) v /= peak;
  out.peak_value = peak;
  out.peak = out.spectrum.argmax();
  return out;
}

PoissonErrors::PoissonErrors(const FrequencyMap& map, const interf::Interferogram& counts)
    : map_(&map) {
  counts.validate();
  if (counts.counts.rows() != map.plan.n_u || counts.counts.cols() != map.plan.n_v)
    throw DomainError("counts do not match the frequency map");
  Array2D<double> weighted(map.plan.n_u, map.plan.n_v);
  for (std::size_t iu = 0; iu < map.plan.n_u; ++iu)
    for (std::size_t iv = 0; iv < map.plan.n_v; ++iv) {
      const double w = map.window_u[iu] * map.window_v[iv];
      weighted(iu, iv) = w * w * counts.counts(iu, iv);
    }
  spectrum_of_variance_ = dft2(weighted);
}

double PoissonErrors::variance(const LinearForm& form) const {
  const std::size_t n_u = map_->plan.n_u;
  const std::size_t n_v = map_->plan.n_v;
  const auto& x = map_->values;
  double total = 0.0;
  for (const auto& [ka, ga] : form) {
    const std::size_t au = ka / n_v, av = ka % n_v;
    const double alpha_a = std::arg(x[ka]);
    for (const auto& [kb, gb] : form) {
      const std::size_t bu = kb / n_v, bv = kb % n_v;
      const double alpha_b = std::arg(x[kb]);
      const complex diff = spectrum_of_variance_((au + n_u - bu) % n_u, (av + n_v - bv) % n_v);
      const complex sum = spectrum_of_variance_((au + bu) % n_u, (av + bv) % n_v);
      const double cov = 0.5 * (std::polar(1.0, -(alpha_a - alpha_b)) * diff).real() +
                         0.5 * (std::polar(1.0, -(alpha_a + alpha_b)) * sum).real();
      total += ga * gb * cov;
    }
  }
  return std::max(0.0, total);
}

LinearForm wavelength_map_form(const WavelengthMap& map, double lambda_a, double lambda_b) {
  if (!map.readout) throw DomainError("wavelength map carries no frequency data for errors");
  const auto& g = map.spectrum.grid;
  const double fa = g.a.index_of(lambda_a);
  const double fb = g.b.index_of(lambda_b);
  if (fa < -1e-9 || fb < -1e-9 || fa > static_cast<double>(g.a.size - 1) + 1e-9 ||
      fb > static_cast<double>(g.b.size - 1) + 1e-9)
    return {};
  const std::size_t ia = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(fa))), g.a.size - 2);
  const std::size_t ib = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(fb))), g.b.size - 2);
  const double ta = std::clamp(fa - static_cast<double>(ia), 0.0, 1.0);
  const double tb = std::clamp(fb - static_cast<double>(ib), 0.0, 1.0);
  const double w[4] = {(1 - ta) * (1 - tb), (1 - ta) * tb, ta * (1 - tb), ta * tb};
  LinearForm y;
  double value = 0.0;
  for (int q = 0; q < 4; ++q) {
    if (w[q] == 0.0) continue;
    const std::size_t na = ia + (q >= 2 ? 1 : 0);
    const std::size_t nb = ib + (q % 2);
    add_scaled(y, wavelength_node_form(map, na, nb), w[q]);
    value += w[q] * map.spectrum.intensity(na, nb);
  }
  // v = y / y_M: dv = (dy - v dy_M) / y_M.
  LinearForm out;
  add_scaled(out, y, 1.0 / map.peak_value);
  add_scaled(out, wavelength_node_form(map, map.peak.first, map.peak.second),
             -value / map.peak_value);
  return merged(std::move(out));
}

CrossSection cross_section(const WavelengthMap& map, LineKind kind,
                           const CrossSectionOptions& options, const PoissonErrors* errors) {
  const auto& s = map.spectrum;
  const auto values = s.intensity.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (values.empty() || *lo == *hi) throw DomainError("map has no unique maximum");
  if (options.samples < 2) throw DomainError("cross-section needs at least 2 samples");

  CrossSection out;
  out.kind = kind;
  if (options.anchor) {
    out.anchor_a = options.anchor->first;
    out.anchor_b = options.anchor->second;
  } else {
    const auto [i, j] = s.argmax();
    out.anchor_a = s.grid.a.at(i);
    out.anchor_b = s.grid.b.at(j);
  }
  const double x0 = 1.0 / out.anchor_a;
  const double y0 = 1.0 / out.anchor_b;
  const double xa_lo = 1.0 / s.grid.a.back(), xa_hi = 1.0 / s.grid.a.start;
  const double yb_lo = 1.0 / s.grid.b.back(), yb_hi = 1.0 / s.grid.b.start;
  double t0 = xa_lo - x0, t1 = xa_hi - x0;
  if (kind == LineKind::Sum) {
    t0 = std::max(t0, y0 - yb_hi);
    t1 = std::min(t1, y0 - yb_lo);
  } else {
    t0 = std::max(t0, yb_lo - y0);
    t1 = std::min(t1, yb_hi - y0);
  }
  if (!(t1 > t0)) throw DomainError("cross-section line does not cross the map");
  const double dt = (t1 - t0) / static_cast<double>(options.samples - 1);
  const long k0 = static_cast<long>(std::ceil(t0 / dt - 1e-9));
  const long k1 = static_cast<long>(std::floor(t1 / dt + 1e-9));
  for (long k = k0; k <= k1; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double la = 1.0 / (x0 + t);
    const double lb = 1.0 / (kind == LineKind::Sum ? y0 - t : y0 + t);
    out.abscissa.push_back(t);
    out.values.push_back(s.interpolate(la, lb));
    out.sigma.push_back(errors ? std::sqrt(errors->variance(wavelength_map_form(map, la, lb)))
                               : 0.0);
  }
  return out;
}

}  // namespace cfts::recon
