#include "cfts/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfts {

UniformAxis UniformAxis::spanning(double first, double last, std::size_t count) {
  if (count < 2) throw DomainError("axis needs at least 2 points");
  return {first, (last - first) / static_cast<double>(count - 1), count};
}

namespace {

void validate_axis(const UniformAxis& axis, const char* name) {
  if (axis.size < 2) throw DomainError(std::string("grid axis ") + name + " needs at least 2 points");
  if (!(axis.step > 0.0) || !std::isfinite(axis.step))
    throw DomainError(std::string("grid axis ") + name + " must be strictly increasing");
  if (!(axis.start > 0.0)) throw DomainError(std::string("grid axis ") + name + " must be positive");
}

}  // namespace

void SpectralGrid::validate() const {
  validate_axis(a, "A");
  validate_axis(b, "B");
}

bool SpectralGrid::operator==(const SpectralGrid& o) const {
  auto same = [](const UniformAxis& x, const UniformAxis& y) {
    return x.start == y.start && x.step == y.step && x.size == y.size;
  };
  return quantity == o.quantity && same(a, o.a) && same(b, o.b);
}

SpectralGrid frequency_grid_from_wavelengths(double lambda_a_min, double lambda_a_max,
                                             std::size_t points_a, double lambda_b_min,
                                             double lambda_b_max, std::size_t points_b) {
  if (!(lambda_a_min > 0.0 && lambda_a_max > lambda_a_min && lambda_b_min > 0.0 &&
        lambda_b_max > lambda_b_min))
    throw DomainError("wavelength limits must be positive and increasing");
  SpectralGrid grid;
  grid.a = UniformAxis::spanning(omega_from_wavelength(lambda_a_max),
                                 omega_from_wavelength(lambda_a_min), points_a);
  grid.b = UniformAxis::spanning(omega_from_wavelength(lambda_b_max),
                                 omega_from_wavelength(lambda_b_min), points_b);
  return grid;
}

void JointSpectrum::validate() const {
  grid.validate();
  if (intensity.rows() != grid.a.size || intensity.cols() != grid.b.size)
    throw DomainError("joint spectrum shape does not match its grid");
  for (double v : intensity.values()) {
    if (!std::isfinite(v) || v < 0.0)
      throw DomainError("joint spectrum values must be finite and nonnegative");
  }
  if (!(sum() > 0.0)) throw NumericError("joint spectrum is empty or all zero");
}

double JointSpectrum::sum() const {
  double s = 0.0;
  for (double v : intensity.values()) s += v;
  return s;
}

std::pair<std::size_t, std::size_t> JointSpectrum::argmax() const {
  std::size_t best = 0;
  const auto v = intensity.values();
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[best]) best = k;
  return {best / intensity.cols(), best % intensity.cols()};
}

double JointSpectrum::max() const {
  auto [i, j] = argmax();
  return intensity(i, j);
}

double JointSpectrum::interpolate(double xa, double xb) const {
  const double fa = grid.a.index_of(xa);
  const double fb = grid.b.index_of(xb);
  const double last_a = static_cast<double>(grid.a.size - 1);
  const double last_b = static_cast<double>(grid.b.size - 1);
  constexpr double slack = 1e-9;
  if (fa < -slack || fb < -slack || fa > last_a + slack || fb > last_b + slack) return 0.0;
  const double ca = std::clamp(fa, 0.0, last_a);
  const double cb = std::clamp(fb, 0.0, last_b);
  const auto ia = std::min<std::size_t>(static_cast<std::size_t>(ca), grid.a.size - 2);
  const auto ib = std::min<std::size_t>(static_cast<std::size_t>(cb), grid.b.size - 2);
  const double ta = ca - static_cast<double>(ia);
  const double tb = cb - static_cast<double>(ib);
  return (1 - ta) * (1 - tb) * intensity(ia, ib) + ta * (1 - tb) * intensity(ia + 1, ib) +
         (1 - ta) * tb * intensity(ia, ib + 1) + ta * tb * intensity(ia + 1, ib + 1);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  auto finalize = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return finalize(finalize(a + 0x9e3779b97f4a7c15ULL) ^ (b + 0x632be59bd9b4e019ULL));
}

unsigned default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

}  // namespace cfts
