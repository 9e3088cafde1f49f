#pragma once

#include "cfts/common.hpp"

namespace cfts::detail {

/// Unnormalized forward 2D DFT, exp(-2 pi i k n / N), row-major.
Array2D<complex> forward_dft2(const Array2D<complex>& input);

}  // namespace cfts::detail
