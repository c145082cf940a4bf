#pragma once

#include <complex>
#include <vector>

namespace glassfx {

/// In-place radix-2 FFT, size a power of two. Forward applies
/// e^{-2*pi*i*jk/n}; inverse applies the conjugate kernel and divides by n.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

} // namespace glassfx
