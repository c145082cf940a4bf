#include "glassfx/fitkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "glassfx/errors.hpp"
#include "glassfx/numeric.hpp"
#include "glassfx/rng.hpp"

namespace glassfx::fit {

namespace {

constexpr const char* kModule = "fitkit";
constexpr double kHuge = 1e100;
constexpr double kResidualZero = 1e-24;
constexpr double kLogClamp = -700.0;  // ln of the smallest representable tail

const std::array<const char*, 5> kParamNames = {"D", "l", "d", "tau1", "tau2"};

double safe_log(double v) { return v > 0 ? std::max(std::log(v), kLogClamp) : kLogClamp; }

struct NmRun {
    std::vector<double> x;
    double f = 0;
    int iters = 0;
    bool converged = false;
};

NmRun nelder_mead_once(const std::function<double(const std::vector<double>&)>& f,
                       const std::vector<double>& x0, double step, double tol, int max_iter,
                       Rng* jitter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> verts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        verts[i + 1][i] += step;
        if (jitter)
            for (std::size_t j = 0; j < n; ++j) verts[i + 1][j] += 0.25 * step * jitter->gauss();
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(verts[i]);

    std::vector<std::size_t> order(n + 1);
    NmRun out;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        if (fv[worst] - fv[best] <= tol * (std::abs(fv[best]) + 1e-300) ||
            fv[best] <= kResidualZero) {
            out.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += verts[i][j];
        }
        for (double& c : centroid) c /= double(n);

        auto blend = [&](double coeff) {
            std::vector<double> x(n);
            for (std::size_t j = 0; j < n; ++j)
                x[j] = centroid[j] + coeff * (centroid[j] - verts[worst][j]);
            return x;
        };

        std::vector<double> reflected = blend(1.0);
        const double fr = f(reflected);
        if (fr < fv[best]) {
            std::vector<double> expanded = blend(2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                verts[worst] = std::move(expanded);
                fv[worst] = fe;
            } else {
                verts[worst] = std::move(reflected);
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            verts[worst] = std::move(reflected);
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, fv[worst])) {
                verts[worst] = std::move(contracted);
                fv[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {  // shrink toward best
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        verts[i][j] = verts[best][j] + 0.5 * (verts[i][j] - verts[best][j]);
                    fv[i] = f(verts[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    out.x = verts[best];
    out.f = fv[best];
    out.iters = iter;
    return out;
}

} // namespace

SimplexOutcome minimize(const std::function<double(const std::vector<double>&)>& objective,
                        const std::vector<double>& x0, const FitOptions& options) {
    require(!x0.empty(), kModule, "nothing to optimize");
    auto guarded = [&](const std::vector<double>& x) {
        double v;
        try {
            v = objective(x);
        } catch (const error&) {
            return kHuge;
        }
        return std::isfinite(v) ? v : kHuge;
    };

    Rng jitter(mix64(options.seed));
    SimplexOutcome out;
    out.x = x0;
    out.f = guarded(x0);

    double step = options.init_step;
    int total_iters = 0;
    for (int run = 0; run <= options.restarts; ++run) {
        NmRun r = nelder_mead_once(guarded, out.x, step, options.tol, options.max_iter,
                                   run == 0 ? nullptr : &jitter);
        total_iters += r.iters;
        if (r.f < out.f) {
            out.x = std::move(r.x);
            out.f = r.f;
            out.converged = r.converged;
        } else if (run == 0) {
            out.converged = r.converged;
        }
        step *= 0.5;
    }
    out.n_iter = total_iters;
    return out;
}

double value_of(const FitResult& result, const std::string& name) {
    for (const auto& [key, value] : result.values)
        if (key == name) return value;
    fail(kModule, "unknown parameter '" + name + "'");
}

namespace {

/// maps the free subset of {D, l, d, tau1, tau2} to log-space coordinates
struct ParamPack {
    trap::ModelParams base;
    std::vector<std::size_t> free_idx;

    ParamPack(const trap::ModelParams& init, const std::set<std::string>& frozen) : base(init) {
        init.validate();
        for (const auto& name : frozen) {
            bool known = false;
            for (const char* k : kParamNames) known = known || name == k;
            require(known, kModule, "unknown frozen parameter '" + name + "'");
        }
        for (std::size_t i = 0; i < kParamNames.size(); ++i)
            if (!frozen.count(kParamNames[i])) free_idx.push_back(i);
        require(!free_idx.empty(), kModule, "all parameters frozen; nothing to fit");
    }

    static double get(const trap::ModelParams& p, std::size_t i) {
        switch (i) {
            case 0: return p.D;
            case 1: return p.l;
            case 2: return p.d;
            case 3: return p.tau1;
            default: return p.tau2;
        }
    }
    static void set(trap::ModelParams& p, std::size_t i, double v) {
        switch (i) {
            case 0: p.D = v; break;
            case 1: p.l = v; break;
            case 2: p.d = v; break;
            case 3: p.tau1 = v; break;
            default: p.tau2 = v; break;
        }
    }

    std::vector<double> pack() const {
        std::vector<double> x;
        for (std::size_t i : free_idx) x.push_back(std::log(get(base, i)));
        return x;
    }
    trap::ModelParams unpack(const std::vector<double>& x) const {
        trap::ModelParams p = base;  // frozen entries stay bit-identical
        for (std::size_t k = 0; k < free_idx.size(); ++k)
            set(p, free_idx[k], std::exp(x[k]));
        return p;
    }
};

FitResult finish_fit(const ParamPack& pack, const SimplexOutcome& opt,
                     const std::set<std::string>& frozen) {
    const trap::ModelParams fitted = pack.unpack(opt.x);
    FitResult result;
    for (std::size_t i = 0; i < kParamNames.size(); ++i)
        result.values.emplace_back(kParamNames[i], ParamPack::get(fitted, i));
    result.frozen.assign(frozen.begin(), frozen.end());
    result.residual = opt.f;
    result.n_iter = opt.n_iter;
    result.converged = opt.converged;
    return result;
}

} // namespace

double ccdf_fit_residual(const std::vector<std::pair<double, obs::Distribution>>& data,
                         const trap::ModelParams& params, double weight_floor,
                         double weight_scale) {
    require(!data.empty(), kModule, "no ccdf data");
    double residual = 0.0;
    for (const auto& [lag_minutes, dist] : data) {
        require(dist.kind == obs::DistKind::ccdf, kModule, "distribution is not a ccdf");
        require(lag_minutes > 0, kModule, "lag must be positive");
        const obs::Distribution model = trap::model_ccdf_auto(lag_minutes, params);
        const double dp = model.abscissae[1] - model.abscissae[0];
        std::vector<double> log_tail(model.ordinates.size());
        for (std::size_t j = 0; j < model.ordinates.size(); ++j)
            log_tail[j] = safe_log(model.ordinates[j]);
        for (std::size_t i = 0; i < dist.abscissae.size(); ++i) {
            const double y = dist.ordinates[i];
            if (!(y >= weight_floor)) continue;  // tail too thin to trust
            const double x = dist.abscissae[i];
            double lm;
            if (x <= 0) {
                lm = log_tail.front();
            } else if (x >= model.abscissae.back()) {
                lm = kLogClamp;
            } else {
                const std::size_t j = std::size_t(x / dp);
                const double w = x / dp - double(j);
                lm = log_tail[j] + w * (log_tail[j + 1] - log_tail[j]);
            }
            const double r = lm - std::log(y);
            residual += r * r;
        }
    }
    return residual * weight_scale;
}

double mspd_fit_residual(const obs::Curve& curve, const trap::ModelParams& params,
                         double weight_scale) {
    require(curve.size() > 0, kModule, "empty MSPD curve");
    double residual = 0.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double t = curve.lags_seconds[i] / 60.0;
        require(curve.values[i] > 0, kModule, "MSPD values must be positive");
        const double r =
            std::log(trap::model_mspd_closed_form(t, params)) - std::log(curve.values[i]);
        residual += r * r;
    }
    return residual * weight_scale;
}

FitResult fit_model_to_ccdfs(const std::vector<std::pair<double, obs::Distribution>>& data,
                             const trap::ModelParams& init, const std::set<std::string>& frozen,
                             const FitOptions& options) {
    require(data.size() >= 2, kModule, "need ccdfs at two or more lags");
    const ParamPack pack(init, frozen);
    // the optimizer sees unit weights; the uniform scale multiplies the
    // reported residual afterwards, so the minimizer path cannot depend
    // on it
    auto objective = [&](const std::vector<double>& x) {
        return ccdf_fit_residual(data, pack.unpack(x), options.ccdf_weight_floor, 1.0);
    };
    SimplexOutcome opt = minimize(objective, pack.pack(), options);
    opt.f *= options.weight_scale;
    return finish_fit(pack, opt, frozen);
}

FitResult fit_model_to_mspd(const obs::Curve& curve, const trap::ModelParams& init,
                            const std::set<std::string>& frozen, const FitOptions& options) {
    require(curve.size() > 0, kModule, "empty MSPD curve");
    const ParamPack pack(init, frozen);
    auto objective = [&](const std::vector<double>& x) {
        return mspd_fit_residual(curve, pack.unpack(x), 1.0);
    };
    SimplexOutcome opt = minimize(objective, pack.pack(), options);
    opt.f *= options.weight_scale;
    return finish_fit(pack, opt, frozen);
}

double sqt_single_form(double tau_minutes, double tau0, double p) {
    return std::exp(-std::pow(tau_minutes / tau0, p));
}

double sqt_double_form(double tau_minutes, double A1, double tau_alpha, double alpha,
                       double tau_beta, double beta) {
    return A1 * std::exp(-std::pow(tau_minutes / tau_alpha, alpha)) +
           (1.0 - A1) * std::exp(-std::pow(tau_minutes / tau_beta, beta));
}

namespace {

double logit(double a) { return std::log(a / (1.0 - a)); }
double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// lag (minutes) where the curve is nearest a target value
double lag_near_value(const obs::Curve& curve, double target) {
    double best_lag = curve.lags_seconds.back() / 60.0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double gap = std::abs(curve.values[i] - target);
        if (gap < best_gap) {
            best_gap = gap;
            best_lag = curve.lags_seconds[i] / 60.0;
        }
    }
    return std::max(best_lag, 1e-6);
}

} // namespace

SqtFitForm fit_sqt(const obs::Curve& curve, SqtForm form, const FitOptions& options) {
    curve.validate();
    const std::size_t need = form == SqtForm::single ? 5 : 8;
    require(curve.size() >= need, kModule, "too few points for this fit form");
    for (double v : curve.values)
        require(v >= -0.05 && v <= 1.05, kModule, "S(q,tau) values must lie in [-0.05, 1.05]");

    std::vector<double> tau(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) tau[i] = curve.lags_seconds[i] / 60.0;

    SqtFitForm out;
    out.form = form;
    const double tau_e = lag_near_value(curve, std::exp(-1.0));

    // a fit whose curve never decays appreciably inside the data window has
    // an unidentified timescale (the minimizer walks it off to infinity)
    const double tau_max = tau.back();
    auto decays_in_window = [&](double value_at_end) { return value_at_end <= 0.95; };

    if (form == SqtForm::single) {
        auto objective = [&](const std::vector<double>& x) {
            const double tau0 = std::exp(x[0]), p = std::exp(x[1]);
            double acc = 0.0;
            for (std::size_t i = 0; i < tau.size(); ++i) {
                const double r = sqt_single_form(tau[i], tau0, p) - curve.values[i];
                acc += r * r;
            }
            return acc;
        };
        const SimplexOutcome opt = minimize(objective, {std::log(tau_e), 0.0}, options);
        out.tau0 = std::exp(opt.x[0]);
        out.p = std::exp(opt.x[1]);
        out.residual = opt.f * options.weight_scale;
        out.n_iter = opt.n_iter;
        out.converged = opt.converged;
        for (double x : opt.x)
            if (std::abs(x) > 30.0) out.converged = false;
        if (!decays_in_window(sqt_single_form(tau_max, out.tau0, out.p)))
            out.converged = false;
        return out;
    }

    auto objective = [&](const std::vector<double>& x) {
        const double a1 = expit(x[0]);
        const double ta = std::exp(x[1]), ea = std::exp(x[2]);
        const double tb = std::exp(x[3]), eb = std::exp(x[4]);
        double acc = 0.0;
        for (std::size_t i = 0; i < tau.size(); ++i) {
            const double r = sqt_double_form(tau[i], a1, ta, ea, tb, eb) - curve.values[i];
            acc += r * r;
        }
        return acc;
    };
    const std::vector<double> x0 = {logit(0.3), std::log(0.3 * tau_e), 0.0,
                                    std::log(3.0 * tau_e), 0.0};
    const SimplexOutcome opt = minimize(objective, x0, options);
    out.A1 = expit(opt.x[0]);
    out.tau_alpha = std::exp(opt.x[1]);
    out.alpha = std::exp(opt.x[2]);
    out.tau_beta = std::exp(opt.x[3]);
    out.beta = std::exp(opt.x[4]);
    out.residual = opt.f * options.weight_scale;
    out.n_iter = opt.n_iter;
    out.converged = opt.converged;
    for (std::size_t i = 1; i < opt.x.size(); ++i)
        if (std::abs(opt.x[i]) > 30.0) out.converged = false;
    if (!decays_in_window(
            sqt_double_form(tau_max, out.A1, out.tau_alpha, out.alpha, out.tau_beta, out.beta)))
        out.converged = false;
    if (out.tau_alpha > out.tau_beta) {
        std::swap(out.tau_alpha, out.tau_beta);
        std::swap(out.alpha, out.beta);
        out.A1 = 1.0 - out.A1;
    }
    out.effectively_single =
        std::abs(out.tau_beta - out.tau_alpha) <= 0.01 * std::max(out.tau_alpha, out.tau_beta);
    return out;
}

} // namespace glassfx::fit
