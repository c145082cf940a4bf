#include "glassfx/fft.hpp"

#include <utility>

#include "glassfx/errors.hpp"
#include "glassfx/numeric.hpp"

namespace glassfx {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    require(is_pow2(n), "fft", "size must be a power of two");
    if (n == 1) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    // root table w[j] = exp(-+ 2 pi i j / n); stages stride through it
    std::vector<std::complex<double>> w(n / 2);
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n / 2; ++j)
        w[j] = std::polar(1.0, sgn * 2.0 * pi * double(j) / double(n));

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w[k * stride];
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }

    if (inverse)
        for (auto& x : a) x /= double(n);
}

} // namespace glassfx
