#pragma once

#include "oam/field.hpp"

namespace oam {

// Unnormalised 2-D DFT over both axes (index 0 = zero frequency, no shift).
// inverse() applies the conjugate kernel and divides by rows*cols, so
// ifft2(fft2(a)) == a.
ComplexArray fft2(const ComplexArray& a);
ComplexArray ifft2(const ComplexArray& a);

// Angular frequency (rad / length) of DFT bin `k` for `n` samples at pitch `d`.
double fft_angular_frequency(int k, int n, double d);

}  // namespace oam
