#include "glassfx/ctrw_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glassfx/errors.hpp"
#include "glassfx/numeric.hpp"
#include "glassfx/parallel.hpp"
#include "glassfx/rng.hpp"

namespace glassfx::sim {

namespace {

constexpr const char* kModule = "ctrw-sim";

/// One walker of the trap process; advance_to() is the only mutation.
struct Walker {
    const trap::ModelParams& mp;
    Rng& rng;
    double alpha;
    double vibration = 0;   // offset from the cage anchor
    double anchor = 0;      // cage anchor
    double now = 0;         // minutes
    double next_jump;
    std::vector<double>* jump_log = nullptr;

    Walker(const trap::ModelParams& params, Rng& r)
        : mp(params), rng(r), alpha(params.alpha()), next_jump(r.exponential(params.tau1)) {}

    void ou_step(double span) {
        if (span <= 0) return;
        const double decay = std::exp(-alpha * span);
        const double var = mp.l * mp.l * (-std::expm1(-2.0 * alpha * span));
        vibration = vibration * decay + rng.gauss() * std::sqrt(var);
    }

    void advance_to(double target) {
        while (next_jump <= target) {
            ou_step(next_jump - now);
            now = next_jump;
            // new cage forms around the landing point: the accumulated
            // vibration is locked into the anchor, the walker teleports
            // by the jump draw, and the vibration restarts
            anchor += vibration + rng.gauss() * mp.d;
            vibration = 0.0;
            if (jump_log) jump_log->push_back(now);
            next_jump += rng.exponential(mp.tau2);
        }
        ou_step(target - now);
        now = target;
    }

    double position() const { return anchor + vibration; }
};

} // namespace

void SimConfig::validate() const {
    params.validate();
    const double dt_cap = std::min(1.0 / (10.0 * params.alpha()), params.tau2 / 100.0);
    require(dt > 0 && dt <= dt_cap * (1.0 + 1e-12), kModule,
            "dt must satisfy dt <= min(1/(10 alpha), tau2/100)");
    require(duration >= dt, kModule, "duration must be at least one step");
    require(n_traj >= 1, kModule, "need at least one trajectory");
}

std::vector<Trajectory> simulate(const SimConfig& config) {
    config.validate();
    const std::size_t n_steps = std::size_t(std::floor(config.duration / config.dt + 1e-9));
    std::vector<Trajectory> out(std::size_t(config.n_traj));

    parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(stream_seed(config.seed, i));
            Trajectory& traj = out[i];
            traj.times.reserve(n_steps + 1);
            traj.positions.reserve(n_steps + 1);
            Walker walker(config.params, rng);
            walker.jump_log = &traj.jump_times;
            traj.times.push_back(0.0);
            traj.positions.push_back(0.0);
            for (std::size_t k = 1; k <= n_steps; ++k) {
                const double t = double(k) * config.dt;
                walker.advance_to(t);
                traj.times.push_back(t);
                traj.positions.push_back(walker.position());
            }
            // jumps beyond the last grid point still belong to [0, duration]
            walker.advance_to(config.duration);
        }
    });
    return out;
}

std::vector<std::vector<double>> sample_positions(const trap::ModelParams& params,
                                                  std::span<const double> sample_times,
                                                  std::int64_t n_traj, std::uint64_t seed) {
    params.validate();
    require(n_traj >= 1, kModule, "need at least one trajectory");
    require(!sample_times.empty(), kModule, "no sample times given");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        require(sample_times[i] >= 0, kModule, "sample times must be nonnegative");
        if (i > 0)
            require(sample_times[i] >= sample_times[i - 1], kModule,
                    "sample times must be nondecreasing");
    }
    std::vector<double> times(sample_times.begin(), sample_times.end());
    std::vector<std::vector<double>> out;
    out.resize(std::size_t(n_traj));

    parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Rng rng(stream_seed(seed, i));
            Walker walker(params, rng);
            auto& row = out[i];
            row.reserve(times.size());
            for (double t : times) {
                walker.advance_to(t);
                row.push_back(walker.position());
            }
        }
    });
    return out;
}

obs::Distribution displacement_histogram(std::span<const Trajectory> trajectories, double t,
                                         double bin_width) {
    require(!trajectories.empty(), kModule, "empty ensemble");
    const auto& times = trajectories.front().times;
    require(t >= 0 && t <= times.back() + 1e-9, kModule, "t beyond trajectory duration");
    const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-9);
    require(it != times.end() && std::abs(*it - t) <= 1e-9, kModule,
            "t does not lie on the trajectory sampling grid");
    const std::size_t k = std::size_t(it - times.begin());

    std::vector<double> displacements;
    displacements.reserve(trajectories.size());
    for (const auto& traj : trajectories)
        displacements.push_back(traj.positions[k] - traj.positions[0]);
    return displacement_histogram(displacements, t, bin_width);
}

obs::Distribution displacement_histogram(std::span<const double> displacements,
                                         double lag_minutes, double bin_width) {
    market::FluctuationSample sample;
    sample.lag_seconds = std::int64_t(std::llround(lag_minutes * 60.0));
    sample.deltas.assign(displacements.begin(), displacements.end());
    sample.origin_count = std::int64_t(sample.deltas.size());
    return obs::pdf_estimate(sample, bin_width);
}

market::PriceSeries synthesize_series(const SimConfig& config, std::int64_t nominal_step_seconds,
                                      double base_price) {
    config.validate();
    require(nominal_step_seconds > 0, kModule, "nominal step must be positive");
    const double step_minutes = double(nominal_step_seconds) / 60.0;
    const double ratio = step_minutes / config.dt;
    require(std::abs(ratio - std::round(ratio)) <= 1e-9 && ratio >= 1.0 - 1e-12, kModule,
            "nominal step must be a positive multiple of dt");
    require(std::isfinite(base_price) && base_price > 0, kModule,
            "base price must be positive");

    const std::size_t n_samples =
        std::size_t(std::floor(config.duration / step_minutes + 1e-9)) + 1;
    const std::int64_t t0 = market::civil_to_epoch(2015, 1, 1, 0, 0, 0);

    Rng rng(stream_seed(config.seed, 0));
    Walker walker(config.params, rng);
    market::PriceSeries series;
    series.nominal_step = nominal_step_seconds;
    series.epoch_times.reserve(n_samples);
    series.prices.reserve(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        walker.advance_to(double(k) * step_minutes);
        const double price = base_price + walker.position();
        require(price > 0, kModule,
                "synthetic price crossed zero; raise the base price");
        series.epoch_times.push_back(t0 + std::int64_t(k) * nominal_step_seconds);
        series.prices.push_back(price);
    }
    series.validate();
    return series;
}

} // namespace glassfx::sim
