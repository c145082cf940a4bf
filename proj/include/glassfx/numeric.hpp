#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>

#include "glassfx/errors.hpp"

namespace glassfx {

inline constexpr double pi = 3.14159265358979323846;

/// (e^x - 1) / x, continuous through x = 0.
inline double expm1_over_x(double x) {
    if (x == 0.0) return 1.0;
    return std::expm1(x) / x;
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Composite Simpson rule over v.size() equally spaced samples,
/// v.size() odd (an even number of intervals of width h).
inline double simpson_uniform(std::span<const double> v, double h) {
    require(v.size() >= 3 && v.size() % 2 == 1, "numeric",
            "simpson needs an odd sample count");
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); i += 2) odd += v[i];
    for (std::size_t i = 2; i + 1 < v.size(); i += 2) even += v[i];
    return h / 3.0 * (v.front() + 4.0 * odd + 2.0 * even + v.back());
}

inline double trapezoid_uniform(std::span<const double> v, double h) {
    require(v.size() >= 2, "numeric", "trapezoid needs two samples");
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
}

/// Linear interpolation of y(xq); x strictly increasing, clamped outside.
inline double interp_linear(std::span<const double> x, std::span<const double> y, double xq) {
    require(x.size() == y.size() && x.size() >= 2, "numeric", "interp needs matched tables");
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return y.back();
    std::size_t lo = 0, hi = x.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        (x[mid] <= xq ? lo : hi) = mid;
    }
    const double w = (xq - x[lo]) / (x[lo + 1] - x[lo]);
    return y[lo] + w * (y[lo + 1] - y[lo]);
}

/// Least-squares slope of y against x.
inline double lsq_slope(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "numeric", "slope needs matched tables");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0, "numeric", "slope undefined for constant abscissae");
    return sxy / sxx;
}

/// Fixed 17-significant-digit rendering; all emitted tables use this so a
/// given run is byte-reproducible and values round-trip exactly.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace glassfx
