#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glassfx/market_data.hpp"
#include "glassfx/observables.hpp"
#include "glassfx/trapmodel.hpp"

namespace glassfx::sim {

/**
 * Ensemble configuration. dt is the output sampling step in minutes and
 * must resolve both the cage relaxation (dt <= 1/(10 alpha)) and the jump
 * clock (dt <= tau2/100); the integrator itself is exact for any step.
 */
struct SimConfig {
    trap::ModelParams params;
    double dt = 0;         ///< minutes
    double duration = 0;   ///< minutes
    std::int64_t n_traj = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct Trajectory {
    std::vector<double> times;       ///< minutes, the dt grid from 0
    std::vector<double> positions;   ///< price offset from the start
    std::vector<double> jump_times;  ///< strictly increasing in [0, duration]
};

/**
 * Monte Carlo ensemble of the trap process. Within a cage the vibration
 * v follows the exact OU update v <- v e^{-alpha dt} + N(0, l^2(1 -
 * e^{-2 alpha dt})) from v = 0; waiting times are Exp(tau1) for the first
 * jump and Exp(tau2) after; at a jump the new cage forms around the
 * landing point: the anchor absorbs the accumulated vibration, the
 * position teleports by N(0, d^2) and v restarts at 0. Updates spanning
 * a jump are split at the jump instant, so jump timing carries no grid
 * bias. Trajectory k draws from the engine seeded with stream_seed(seed,
 * k); results are bit-reproducible and independent of thread scheduling.
 */
std::vector<Trajectory> simulate(const SimConfig& config);

/**
 * Positions of n_traj independent trajectories at the given sample times
 * only (minutes, nondecreasing). Same process and per-trajectory seed
 * derivation as simulate(); the draw sequence depends on the sampling
 * instants, so distributions match simulate() but individual paths need
 * the same grid to coincide.
 */
std::vector<std::vector<double>> sample_positions(const trap::ModelParams& params,
                                                  std::span<const double> sample_times,
                                                  std::int64_t n_traj, std::uint64_t seed);

/// pdf of p(t) - p(0) over the ensemble; t must lie on the trajectory grid.
obs::Distribution displacement_histogram(std::span<const Trajectory> trajectories, double t,
                                         double bin_width);

/// pdf of precomputed displacements (shared binning path).
obs::Distribution displacement_histogram(std::span<const double> displacements,
                                         double lag_minutes, double bin_width);

/**
 * One long trajectory resampled to nominal_step (seconds, a multiple of
 * dt) and offset to a positive base price, packaged as a PriceSeries
 * starting 2015-01-01 00:00 UTC.
 */
market::PriceSeries synthesize_series(const SimConfig& config, std::int64_t nominal_step_seconds,
                                      double base_price = 1.0);

} // namespace glassfx::sim
