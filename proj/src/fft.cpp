#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace cfts::detail {

namespace {

// FFTW planning is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

Array2D<complex> forward_dft2(const Array2D<complex>& input) {
  const std::size_t rows = input.rows();
  const std::size_t cols = input.cols();
  const std::size_t n = rows * cols;
  if (n == 0) return {};
  std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(n));
  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(n));
  if (!in || !out) throw NumericError("FFT buffer allocation failed");

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), in.get(), out.get(),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  if (!plan) throw NumericError("FFT planning failed");
  const auto src = input.values();
  for (std::size_t k = 0; k < n; ++k) {
    in.get()[k][0] = src[k].real();
    in.get()[k][1] = src[k].imag();
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  Array2D<complex> result(rows, cols);
  auto dst = result.values();
  for (std::size_t k = 0; k < n; ++k) dst[k] = complex(out.get()[k][0], out.get()[k][1]);
  return result;
}

}  // namespace cfts::detail
