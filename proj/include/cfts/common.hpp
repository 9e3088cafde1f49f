#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfts {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPiC = 2.0 * kPi * kSpeedOfLight;

constexpr double nanometers(double v) { return v * 1e-9; }
constexpr double micrometers(double v) { return v * 1e-6; }
constexpr double millimeters(double v) { return v * 1e-3; }
constexpr double femtoseconds(double v) { return v * 1e-15; }
constexpr double degrees(double v) { return v * kPi / 180.0; }

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
constexpr double omega_from_wavelength(double lambda) { return kTwoPiC / lambda; }
constexpr double wavelength_from_omega(double omega) { return kTwoPiC / omega; }

using complex = std::complex<double>;

/// Base of all library errors. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  enum class Kind { Config, Domain, Numeric };
  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Malformed configuration: missing or unknown keys, unparsable values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Kind::Config, what) {}
};

/// Inputs outside the physical or hardware domain (band, range, invariants).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(Kind::Domain, what) {}
};

/// Numerical failure: non-convergence, overflow, undefined normalization.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(Kind::Numeric, what) {}
};

struct UniformAxis {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  double at(std::size_t i) const { return start + step * static_cast<double>(i); }
  double back() const { return at(size - 1); }
  /// Fractional index of coordinate x (may lie outside [0, size-1]).
  double index_of(double x) const { return (x - start) / step; }

  static UniformAxis spanning(double first, double last, std::size_t count);
};

/// Dense row-major 2D array. Rows follow the first axis.
template <class T>
class Array2D {
 public:
  Array2D() = default;
  Array2D(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Array2D&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

enum class SpectralQuantity { AngularFrequency, Wavelength };

/// Two uniform axes addressing (i_A, i_B). Angular frequency in rad/s or
/// vacuum wavelength in m, depending on `quantity`.
struct SpectralGrid {
  UniformAxis a;
  UniformAxis b;
  SpectralQuantity quantity = SpectralQuantity::AngularFrequency;

  /// Throws DomainError unless both axes are non-empty, strictly increasing
  /// and positive.
  void validate() const;
  double cell_area() const { return a.step * b.step; }
  bool operator==(const SpectralGrid&) const;
};

/// Uniform angular-frequency grid whose end points are the frequencies of
/// the given wavelength limits.
SpectralGrid frequency_grid_from_wavelengths(double lambda_a_min, double lambda_a_max,
                                             std::size_t points_a, double lambda_b_min,
                                             double lambda_b_max, std::size_t points_b);

/// Nonnegative joint spectral intensity S(x_A, x_B) on a SpectralGrid.
struct JointSpectrum {
  SpectralGrid grid;
  Array2D<double> intensity;

  /// All values finite and >= 0, shape matches the grid, integral > 0.
  void validate() const;
  double sum() const;
  double integral() const { return sum() * grid.cell_area(); }
  /// Index of the maximum; ties go to the lowest (i_A, i_B) lexicographically.
  std::pair<std::size_t, std::size_t> argmax() const;
  double max() const;
  /// Bilinear interpolation at (x_A, x_B); zero outside the grid.
  double interpolate(double xa, double xb) const;
};

/// Mixes two 64-bit values into a well-distributed seed (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// splitmix64 stream; cheap to seed, used for per-point Poisson draws.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

unsigned default_workers();

/// Runs fn(i) for i in [0, n) on up to `workers` threads using a static
/// contiguous partition. fn must only write to state owned by index i.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn);

}  // namespace cfts

#include "cfts/detail/parallel.inl"
