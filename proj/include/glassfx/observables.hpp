#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "glassfx/market_data.hpp"

namespace glassfx::obs {

enum class DistKind { pdf, ccdf };

/**
 * Binned pdf or stepwise complementary cdf of price fluctuations at a
 * fixed lag. For a pdf the abscissae are bin centers and the ordinates
 * densities; for a ccdf the abscissae are thresholds x and the ordinates
 * the folded tail P(|dp| > x). Model-derived tables carry n_samples = 0.
 */
struct Distribution {
    DistKind kind = DistKind::pdf;
    double lag_seconds = 0;
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    std::int64_t n_samples = 0;
};

/// Observable as a tabulated function of lag; counts are samples per lag
/// (0 for analytic curves).
struct Curve {
    std::vector<double> lags_seconds;  ///< strictly increasing
    std::vector<double> values;
    std::vector<std::int64_t> counts;

    std::size_t size() const { return lags_seconds.size(); }
    void validate() const;
};

struct Wavevector {
    double q = 0;  ///< inverse price units
};

/// Raw second and fourth moments of a delta sample.
struct Moments {
    double m2 = 0;
    double m4 = 0;
    std::int64_t n = 0;
};

Moments sample_moments(std::span<const double> deltas);

/**
 * Histogram density on bins of width bin_width centered symmetrically at
 * zero (bin k covers [(k-1/2) w, (k+1/2) w)); density = count / (n w).
 * Rejects a bin width so coarse that the spread of the data collapses
 * into fewer than three bins.
 */
Distribution pdf_estimate(const market::FluctuationSample& sample, double bin_width);

/**
 * Empirical folded tail P(|dp| > x), thresholds at 0 and at each distinct
 * |dp|. Folding uses the symmetry of the fluctuation pdf and doubles the
 * tail statistics.
 */
Distribution ccdf_estimate(const market::FluctuationSample& sample);

/**
 * Mean squared price displacement <[p(t0+lag) - p(t0)]^2> over admissible
 * origins. Lags with zero admissible origins are omitted rather than
 * raised.
 */
Curve mspd(const market::PriceSeries& series, std::span<const double> lag_seconds,
           const std::optional<market::WindowSpec>& window = std::nullopt,
           std::int64_t origin_stride = 1);

/// Price correlation S(q, lag) = <cos(q dp)> per lag sample; 1 at lag 0.
Curve sqt(std::span<const market::FluctuationSample> samples, Wavevector q);

/// Non-Gaussian parameter alpha2 = m4 / (3 m2^2) - 1 per lag sample, the
/// one-dimensional convention.
Curve alpha2(std::span<const market::FluctuationSample> samples);

/// q = 2 pi / (10 r_l): probes the dynamics at ten localization lengths,
/// the colloidal-diameter convention.
Wavevector wavevector_from_localization(double r_l);

/// Builds one fluctuation sample per lag; lags without any admissible
/// origin are dropped from the result (per-lag work runs in parallel).
std::vector<market::FluctuationSample> fluctuation_ladder(
    const market::PriceSeries& series, std::span<const double> lag_seconds,
    const std::optional<market::WindowSpec>& window = std::nullopt,
    std::int64_t origin_stride = 1);

} // namespace glassfx::obs
