#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "glassfx/observables.hpp"
#include "glassfx/trapmodel.hpp"

namespace glassfx::fit {

/**
 * Simplex (Nelder-Mead) settings. Positivity is enforced by optimizing
 * log-parameters (and a logit for the double-form amplitude). Restart
 * policy: after the initial run from the start point, `restarts` further
 * runs begin at the best point so far with the initial simplex step
 * halved each time and jittered by seeded Gaussian noise; the best vertex
 * ever seen wins, so the returned residual never exceeds the residual at
 * the start point.
 */
struct FitOptions {
    int max_iter = 4000;              ///< per run
    int restarts = 3;
    double tol = 1e-8;                ///< relative residual-change convergence
    double init_step = 0.25;          ///< simplex step in transformed space
    std::uint64_t seed = 0x5eedf17ULL;
    double ccdf_weight_floor = 1e-4;  ///< tail probs below this get weight 0
    double weight_scale = 1.0;        ///< uniform residual weight
};

struct FitResult {
    std::vector<std::pair<std::string, double>> values;  ///< canonical order
    std::vector<std::string> frozen;
    double residual = 0;
    int n_iter = 0;
    bool converged = false;
};

/// Looks up a named parameter in a fit result.
double value_of(const FitResult& result, const std::string& name);

/// Weighted sum of squared log-residuals between the model tail and the
/// measured ccdfs (lag in minutes paired with each distribution).
double ccdf_fit_residual(const std::vector<std::pair<double, obs::Distribution>>& data,
                         const trap::ModelParams& params, double weight_floor = 1e-4,
                         double weight_scale = 1.0);

/// Sum of squared log-residuals of the model second moment against a
/// measured MSPD curve.
double mspd_fit_residual(const obs::Curve& curve, const trap::ModelParams& params,
                         double weight_scale = 1.0);

/**
 * Fits {D, l, d, tau1, tau2} to a set of measured ccdfs across all lags
 * simultaneously with one shared parameter vector. Parameters named in
 * `frozen` are held at their init values and returned bit-identically.
 * Non-convergence is flagged, never thrown.
 */
FitResult fit_model_to_ccdfs(const std::vector<std::pair<double, obs::Distribution>>& data,
                             const trap::ModelParams& init, const std::set<std::string>& frozen,
                             const FitOptions& options = {});

/// Same contract against a measured MSPD curve.
FitResult fit_model_to_mspd(const obs::Curve& curve, const trap::ModelParams& init,
                            const std::set<std::string>& frozen, const FitOptions& options = {});

enum class SqtForm { single, double_exp };

/**
 * Fitted relaxation form for S(q, tau): either exp(-(tau/tau0)^p) or
 * A1 exp(-(tau/tau_alpha)^alpha) + (1-A1) exp(-(tau/tau_beta)^beta) with
 * A1 in [0, 1]. Double fits are canonicalized to tau_alpha <= tau_beta;
 * effectively_single marks a degenerate double fit (timescales within 1%).
 */
struct SqtFitForm {
    SqtForm form = SqtForm::single;
    double tau0 = 0, p = 0;
    double A1 = 0, tau_alpha = 0, alpha = 0, tau_beta = 0, beta = 0;
    double residual = 0;
    int n_iter = 0;
    bool converged = false;
    bool effectively_single = false;
};

double sqt_single_form(double tau_minutes, double tau0, double p);
double sqt_double_form(double tau_minutes, double A1, double tau_alpha, double alpha,
                       double tau_beta, double beta);

/// Least-squares fit of the chosen form to an S(q, tau) curve. Requires
/// values in [-0.05, 1.05] and >= 5 (single) or >= 8 (double) points.
SqtFitForm fit_sqt(const obs::Curve& curve, SqtForm form, const FitOptions& options = {});

/**
 * Bare simplex minimizer (exposed for reuse and testing): minimizes f
 * from x0 with the restart policy above. Convergence: simplex residual
 * spread within tol relative, or residual numerically zero.
 */
struct SimplexOutcome {
    std::vector<double> x;
    double f = 0;
    int n_iter = 0;
    bool converged = false;
};

SimplexOutcome minimize(const std::function<double(const std::vector<double>&)>& objective,
                        const std::vector<double>& x0, const FitOptions& options);

} // namespace glassfx::fit
