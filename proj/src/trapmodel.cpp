#include "glassfx/trapmodel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "glassfx/errors.hpp"
#include "glassfx/fft.hpp"
#include "glassfx/numeric.hpp"

namespace glassfx::trap {

namespace {

constexpr const char* kModule = "trapmodel";
constexpr std::size_t kMinGridPoints = std::size_t(1) << 10;
constexpr std::size_t kMaxGridPoints = std::size_t(1) << 22;
constexpr double kRingingTolerance = 1e-8;   // of the pdf peak
constexpr double kMassTolerance = 1e-6;
constexpr double kMomentCrossTolerance = 1e-4;

} // namespace

void ModelParams::validate() const {
    require(D > 0 && l > 0 && d > 0 && tau1 > 0 && tau2 > 0, kModule,
            "all five model parameters must be positive");
    require(std::isfinite(D) && std::isfinite(l) && std::isfinite(d) &&
                std::isfinite(tau1) && std::isfinite(tau2),
            kModule, "model parameters must be finite");
}

void PriceGrid::validate(const ModelParams& params, double t_max_minutes) const {
    params.validate();
    require(is_pow2(n_points) && n_points >= kMinGridPoints, kModule,
            "grid points must be a power of two >= 1024");
    require(half_width > 0, kModule, "grid half-width must be positive");
    require(spacing() <= params.l / 10.0 * (1.0 + 1e-12), kModule,
            "grid spacing must not exceed l/10");
    const double sigma_max = std::sqrt(model_mspd_closed_form(t_max_minutes, params));
    require(half_width >= 20.0 * sigma_max * (1.0 - 1e-12), kModule,
            "grid half-width must cover 20 sigma of the widest evaluated time");
}

double ou_variance(const ModelParams& params, double t) {
    return params.l * params.l * (-std::expm1(-2.0 * params.alpha() * t));
}

double f_vib(double p, double t, const ModelParams& params) {
    params.validate();
    require(t > 0, kModule, "f_vib requires t > 0");
    const double var = ou_variance(params, t);
    return std::exp(-0.5 * p * p / var) / std::sqrt(2.0 * pi * var);
}

double f_vib_hat(double q, double t, const ModelParams& params) {
    require(t > 0, kModule, "f_vib_hat requires t > 0");
    return std::exp(-0.5 * q * q * ou_variance(params, t));
}

double f_jump_hat(double q, const ModelParams& params) {
    return std::exp(-0.5 * q * q * params.d * params.d);
}

WaitingDensities waiting_densities(double t, const ModelParams& params) {
    params.validate();
    require(t >= 0, kModule, "waiting densities require t >= 0");
    return {std::exp(-t / params.tau1) / params.tau1,
            std::exp(-t / params.tau2) / params.tau2};
}

double g_hat(double q, double t, const ModelParams& params) {
    if (t <= 0) return 1.0;
    const double q2 = q * q;
    const double vib = std::exp(-0.5 * q2 * ou_variance(params, t));
    const double jump = std::exp(-0.5 * q2 * params.d * params.d);
    const double f_inf = std::exp(-0.5 * q2 * (params.l * params.l + params.d * params.d));

    // tau2 [e^{(Finf-1)t/tau2} - e^{-t/tau1}] / (tau2 - tau1 + Finf tau1)
    //   = (t/tau1) * k,  k = e^{-t/tau1} em1x(x),  x = u t / tau2,
    // with u = Finf - (tau1 - tau2)/tau1 the distance to the denominator
    // zero. Identity: x - t/tau1 = (Finf - 1) t / tau2.
    const double f_star = (params.tau1 - params.tau2) / params.tau1;
    const double x = (f_inf - f_star) * t / params.tau2;
    const double surv = std::exp(-t / params.tau1);
    double k;
    if (std::abs(x) <= 1e-3)
        k = surv * expm1_over_x(x);  // accurate through the crossing
    else
        k = (std::exp((f_inf - 1.0) * t / params.tau2) - surv) / x;
    return vib * (surv + vib * jump * (t / params.tau1) * k);
}

double model_mspd_closed_form(double t, const ModelParams& params) {
    const double a = ou_variance(params, t);
    const double surv = std::exp(-t / params.tau1);
    const double jumped = -std::expm1(-t / params.tau1);  // 1 - e^{-t/tau1}
    const double b = params.l * params.l + params.d * params.d;
    return a * surv + (2.0 * a + params.d * params.d) * jumped +
           b * (t - params.tau1 * jumped) / params.tau2;
}

PriceGrid auto_grid(const ModelParams& params, double t_min, double t_max) {
    params.validate();
    require(t_min > 0 && t_max >= t_min, kModule, "grid times must satisfy 0 < t_min <= t_max");

    const double sigma_min = std::sqrt(std::max(ou_variance(params, t_min), 1e-300));
    // resolve the narrowest vibration peak well enough for Simpson mass
    // to land within the 1e-6 drift budget
    const double target_spacing = std::min(params.l / 10.0, sigma_min / 16.0);
    const double sigma_max = std::sqrt(model_mspd_closed_form(t_max, params));
    // the extra term covers the tails of rare wide jump components, which
    // carry second moment far beyond 20 sigma of the mixture when jumps
    // are still scarce
    const double sigma_jump = std::sqrt(params.l * params.l + params.d * params.d);
    const double half_width =
        std::max(20.0 * sigma_max + 10.0 * sigma_jump, 64.0 * target_spacing);

    const std::size_t wanted =
        next_pow2(std::size_t(std::ceil(2.0 * half_width / target_spacing)));
    require(wanted <= kMaxGridPoints, kModule,
            "auto grid would exceed 2^22 points; time span too extreme for this parameter set");
    return PriceGrid{half_width, std::max(wanted, kMinGridPoints)};
}

obs::Distribution g_of_p(double t, const ModelParams& params, const PriceGrid& grid) {
    require(t > 0, kModule, "g_of_p requires t > 0");
    grid.validate(params, t);

    const std::size_t n = grid.n_points;
    const double dp = grid.spacing();
    const double dq = pi / grid.half_width;

    // price grid p_k = -L + k dp; frequency j wraps negative above n/2.
    // The (-1)^j factor shifts the transform origin to -L.
    std::vector<std::complex<double>> spectrum(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double q = (j <= n / 2 ? double(j) : double(j) - double(n)) * dq;
        const double sign = (j & 1) ? -1.0 : 1.0;
        spectrum[j] = sign * g_hat(q, t, params);
    }
    fft(spectrum, false);

    obs::Distribution out;
    out.kind = obs::DistKind::pdf;
    out.lag_seconds = t * 60.0;
    out.n_samples = 0;
    out.abscissae.resize(n);
    out.ordinates.resize(n);
    const double scale = dq / (2.0 * pi);
    for (std::size_t k = 0; k < n; ++k) {
        out.abscissae[k] = -grid.half_width + double(k) * dp;
        out.ordinates[k] = scale * spectrum[k].real();
    }

    // the distribution is even; enforce the symmetry exactly
    for (std::size_t k = 1; k < n / 2; ++k) {
        const double avg = 0.5 * (out.ordinates[k] + out.ordinates[n - k]);
        out.ordinates[k] = avg;
        out.ordinates[n - k] = avg;
    }

    double peak = 0.0, most_negative = 0.0;
    for (double v : out.ordinates) {
        peak = std::max(peak, v);
        most_negative = std::min(most_negative, v);
    }
    if (most_negative < -kRingingTolerance * peak)
        fail(kModule, "inverse transform ringing above tolerance; grid too coarse or narrow");
    for (double& v : out.ordinates) v = std::max(v, 0.0);

    // Simpson mass over [-L, L] with the even wrap value at +L
    std::vector<double> wrapped(out.ordinates.begin(), out.ordinates.end());
    wrapped.push_back(out.ordinates.front());
    const double mass = simpson_uniform(wrapped, dp);
    if (std::abs(mass - 1.0) > kMassTolerance)
        fail(kModule, "normalization drift " + format_g17(mass - 1.0) +
                          " exceeds tolerance; grid too coarse or narrow");
    return out;
}

obs::Distribution g_of_p_auto(double t, const ModelParams& params) {
    PriceGrid grid = auto_grid(params, t, t);
    for (int doubling = 0;; ++doubling) {
        try {
            return g_of_p(t, params, grid);
        } catch (const error&) {
            if (doubling >= 3 || grid.n_points * 2 > kMaxGridPoints) throw;
            grid.n_points *= 2;
        }
    }
}

namespace {

obs::Distribution fold_to_ccdf(const obs::Distribution& pdf) {
    const std::size_t n = pdf.abscissae.size();
    const double dp = pdf.abscissae[1] - pdf.abscissae[0];
    const std::size_t center = n / 2;  // p = 0

    obs::Distribution out;
    out.kind = obs::DistKind::ccdf;
    out.lag_seconds = pdf.lag_seconds;
    out.n_samples = 0;
    const std::size_t m = n - center;  // thresholds 0 .. L-dp
    out.abscissae.resize(m + 1);
    out.ordinates.resize(m + 1);

    // tail(x_j) = 2 * trapezoid of the pdf from x_j to L; the value at +L
    // is the wrap of the -L sample
    auto value_at = [&](std::size_t j) {
        return j < m ? pdf.ordinates[center + j] : pdf.ordinates[0];
    };
    double tail = 0.0;
    out.abscissae[m] = double(m) * dp;
    out.ordinates[m] = 0.0;
    for (std::size_t j = m; j-- > 0;) {
        tail += dp * (value_at(j) + value_at(j + 1));
        out.abscissae[j] = double(j) * dp;
        out.ordinates[j] = tail;
    }
    return out;
}

/// second moment of the tabulated pdf by quadrature
double quadrature_second_moment(const obs::Distribution& pdf) {
    const double dp = pdf.abscissae[1] - pdf.abscissae[0];
    double acc = 0.0;
    for (std::size_t k = 0; k < pdf.abscissae.size(); ++k)
        acc += pdf.abscissae[k] * pdf.abscissae[k] * pdf.ordinates[k];
    return acc * dp;
}

/// -d^2 G~/dq^2 at q=0 by central differences with one Richardson step
double spectral_second_moment(double t, const ModelParams& params, double scale_hint) {
    const double h = 0.05 / std::sqrt(std::max(scale_hint, 1e-300));
    auto estimate = [&](double step) {
        return 2.0 * (1.0 - g_hat(step, t, params)) / (step * step);
    };
    const double coarse = estimate(h);
    const double fine = estimate(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace

obs::Distribution model_ccdf(double t, const ModelParams& params, const PriceGrid& grid) {
    return fold_to_ccdf(g_of_p(t, params, grid));
}

obs::Distribution model_ccdf_auto(double t, const ModelParams& params) {
    return fold_to_ccdf(g_of_p_auto(t, params));
}

namespace {

obs::Curve mspd_impl(std::span<const double> t_minutes, const ModelParams& params,
                     const PriceGrid* grid) {
    require(!t_minutes.empty(), kModule, "empty time grid");
    for (std::size_t i = 0; i < t_minutes.size(); ++i) {
        require(t_minutes[i] > 0, kModule, "model times must be positive");
        if (i > 0)
            require(t_minutes[i] > t_minutes[i - 1], kModule,
                    "time grid must be strictly increasing");
    }
    obs::Curve out;
    for (double t : t_minutes) {
        const obs::Distribution pdf = grid ? g_of_p(t, params, *grid) : g_of_p_auto(t, params);
        const double quad = quadrature_second_moment(pdf);
        const double spectral = spectral_second_moment(t, params, quad);
        if (std::abs(quad - spectral) > kMomentCrossTolerance * std::max(spectral, 1e-300))
            fail(kModule, "quadrature/spectral second-moment cross-check failed at t = " +
                              format_g17(t));
        out.lags_seconds.push_back(t * 60.0);
        out.values.push_back(quad);
        out.counts.push_back(0);
    }
    out.validate();
    return out;
}

} // namespace

obs::Curve model_mspd(std::span<const double> t_minutes, const ModelParams& params,
                      const PriceGrid& grid) {
    return mspd_impl(t_minutes, params, &grid);
}

obs::Curve model_mspd(std::span<const double> t_minutes, const ModelParams& params) {
    return mspd_impl(t_minutes, params, nullptr);
}

} // namespace glassfx::trap
