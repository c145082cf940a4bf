#pragma once

#include <cstddef>
#include <span>

#include "glassfx/observables.hpp"

namespace glassfx::trap {

/**
 * Trap-model parameters. The price vibrates inside a cage as an
 * Ornstein-Uhlenbeck process with short-time diffusion D (price^2/min)
 * and stationary width l (price), and hops between cages by Gaussian
 * jumps of width d (price). The first hop waits an exponential time of
 * mean tau1 minutes, later hops of mean tau2. The cage stiffness
 * alpha = D / l^2 is derived, never stored.
 */
struct ModelParams {
    double D = 0;
    double l = 0;
    double d = 0;
    double tau1 = 0;
    double tau2 = 0;

    double alpha() const { return D / (l * l); }
    void validate() const;
};

/**
 * Symmetric price grid [-half_width, half_width) carrying n_points
 * samples for the inverse Fourier transform. Invariants: n_points a
 * power of two >= 2^10, spacing <= l/10, and half_width >= 20 sigma of
 * the displacement distribution at the largest evaluated time.
 */
struct PriceGrid {
    double half_width = 0;
    std::size_t n_points = 0;

    double spacing() const { return 2.0 * half_width / double(n_points); }
    void validate(const ModelParams& params, double t_max_minutes) const;
};

/// Vibrational variance l^2 (1 - e^{-2 alpha t}).
double ou_variance(const ModelParams& params, double t);

/// In-cage displacement density: a centered Gaussian of variance
/// ou_variance(t). Requires t > 0.
double f_vib(double p, double t, const ModelParams& params);

/// Fourier transform of f_vib: exp(-q^2 l^2 (1 - e^{-2 alpha t}) / 2).
double f_vib_hat(double q, double t, const ModelParams& params);

/// Fourier transform of the jump kernel: exp(-q^2 d^2 / 2).
double f_jump_hat(double q, const ModelParams& params);

struct WaitingDensities {
    double phi1 = 0;
    double phi2 = 0;
};

/// Exponential waiting-time densities for the first and subsequent jumps;
/// tau1 * phi1(t) is the no-jump survival probability.
WaitingDensities waiting_densities(double t, const ModelParams& params);

/**
 * Characteristic function of the displacement distribution,
 *
 *   G~(q,t) = e^{-t/tau1} V(q,t)
 *           + V(q,t) F(q,t) tau2 [e^{(Finf(q)-1) t/tau2} - e^{-t/tau1}]
 *             / [tau2 - tau1 + Finf(q) tau1],
 *
 * with V(q,t) the vibration transform at time t, F(q,t) = V(q,t) J(q) the
 * per-jump kernel (J the jump transform), and Finf(q) = J(q) exp(-q^2 l^2/2)
 * its stationary limit, which enters the exponential and the denominator.
 * The bracketed ratio has a removable singularity where the denominator
 * crosses zero, at Finf = (tau1 - tau2)/tau1; it is evaluated through the
 * exact rewrite tau2 [.]/[.] = e^{-t/tau1} (t/tau1) em1x(u t/tau2) with
 * u = Finf - (tau1-tau2)/tau1 and em1x(x) = (e^x - 1)/x, which is finite
 * and smooth through the crossing and also covers tau1 == tau2.
 * G~(0,t) = 1 for every t and parameter set.
 */
double g_hat(double q, double t, const ModelParams& params);

/// Closed-form second moment of the displacement distribution:
///   a(t) e^{-t/tau1} + (2 a(t) + d^2)(1 - e^{-t/tau1})
///   + (l^2 + d^2)(t - tau1 (1 - e^{-t/tau1})) / tau2,  a(t) = ou_variance.
double model_mspd_closed_form(double t, const ModelParams& params);

/// Grid sized from the parameters: spacing resolves the narrowest
/// vibration width at t_min (and l/10), half-width covers 20 sigma at t_max.
PriceGrid auto_grid(const ModelParams& params, double t_min, double t_max);

/**
 * Displacement pdf at time t by inverse FFT of g_hat on the grid. The
 * result is symmetrized (it is even by construction), negative ringing
 * below 1e-8 of the peak is clipped to zero, and the Simpson mass must be
 * within 1e-6 of one; violations raise an accuracy error.
 */
obs::Distribution g_of_p(double t, const ModelParams& params, const PriceGrid& grid);

/// g_of_p on an auto-sized grid, doubling the resolution up to three
/// times if the accuracy checks fail.
obs::Distribution g_of_p_auto(double t, const ModelParams& params);

/// Folded model tail P(|p| > x) by trapezoidal integration of the pdf
/// from x outward; thresholds are the nonnegative grid points.
obs::Distribution model_ccdf(double t, const ModelParams& params, const PriceGrid& grid);
obs::Distribution model_ccdf_auto(double t, const ModelParams& params);

/**
 * Model mean squared displacement over a time grid (minutes). Each value
 * is the quadrature second moment of g_of_p, cross-checked against the
 * spectral form -d^2 G~/dq^2 at q=0 evaluated by Richardson-extrapolated
 * central differences; disagreement beyond 1e-4 relative raises.
 */
obs::Curve model_mspd(std::span<const double> t_minutes, const ModelParams& params,
                      const PriceGrid& grid);
obs::Curve model_mspd(std::span<const double> t_minutes, const ModelParams& params);

} // namespace glassfx::trap
