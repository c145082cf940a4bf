#include "glassfx/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "glassfx/errors.hpp"
#include "glassfx/numeric.hpp"
#include "glassfx/parallel.hpp"

namespace glassfx::obs {

namespace {
constexpr const char* kModule = "observables";
}

void Curve::validate() const {
    require(lags_seconds.size() == values.size() && values.size() == counts.size(), kModule,
            "curve columns must have equal length");
    for (std::size_t i = 1; i < lags_seconds.size(); ++i)
        require(lags_seconds[i] > lags_seconds[i - 1], kModule,
                "curve lags must be strictly increasing");
}

Moments sample_moments(std::span<const double> deltas) {
    Moments m;
    m.n = std::int64_t(deltas.size());
    for (double d : deltas) {
        const double d2 = d * d;
        m.m2 += d2;
        m.m4 += d2 * d2;
    }
    if (m.n > 0) {
        m.m2 /= double(m.n);
        m.m4 /= double(m.n);
    }
    return m;
}

Distribution pdf_estimate(const market::FluctuationSample& sample, double bin_width) {
    require(bin_width > 0, kModule, "bin width must be positive");
    require(!sample.deltas.empty(), kModule, "empty fluctuation sample");

    std::int64_t k_max = 0;
    std::vector<std::int64_t> bins(sample.deltas.size());
    for (std::size_t i = 0; i < sample.deltas.size(); ++i) {
        bins[i] = std::int64_t(std::llround(sample.deltas[i] / bin_width));
        k_max = std::max(k_max, std::int64_t(std::llabs(bins[i])));
    }
    double max_abs = 0;
    for (double d : sample.deltas) max_abs = std::max(max_abs, std::abs(d));
    if (max_abs > 0 && 2 * k_max + 1 < 3)
        fail(kModule, "bin width too coarse: data spread covers fewer than 3 bins");

    const std::size_t n_bins = std::size_t(2 * k_max + 1);
    std::vector<double> counts(n_bins, 0.0);
    for (std::int64_t k : bins) counts[std::size_t(k + k_max)] += 1.0;

    Distribution out;
    out.kind = DistKind::pdf;
    out.lag_seconds = double(sample.lag_seconds);
    out.n_samples = std::int64_t(sample.deltas.size());
    out.abscissae.resize(n_bins);
    out.ordinates.resize(n_bins);
    const double norm = double(out.n_samples) * bin_width;
    for (std::size_t j = 0; j < n_bins; ++j) {
        out.abscissae[j] = double(std::int64_t(j) - k_max) * bin_width;
        out.ordinates[j] = counts[j] / norm;
    }
    return out;
}

Distribution ccdf_estimate(const market::FluctuationSample& sample) {
    require(!sample.deltas.empty(), kModule, "empty fluctuation sample");

    std::vector<double> mags(sample.deltas.size());
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(sample.deltas[i]);
    std::sort(mags.begin(), mags.end());

    const double n = double(mags.size());
    Distribution out;
    out.kind = DistKind::ccdf;
    out.lag_seconds = double(sample.lag_seconds);
    out.n_samples = std::int64_t(mags.size());

    // thresholds: 0 plus each distinct magnitude; ordinate = P(|dp| > x)
    if (mags.front() > 0.0) {
        out.abscissae.push_back(0.0);
        out.ordinates.push_back(1.0);
    }
    std::size_t i = 0;
    while (i < mags.size()) {
        std::size_t j = i;
        while (j < mags.size() && mags[j] == mags[i]) ++j;
        out.abscissae.push_back(mags[i]);
        out.ordinates.push_back(double(mags.size() - j) / n);
        i = j;
    }
    return out;
}

std::vector<market::FluctuationSample> fluctuation_ladder(
    const market::PriceSeries& series, std::span<const double> lag_seconds,
    const std::optional<market::WindowSpec>& window, std::int64_t origin_stride) {
    std::vector<std::optional<market::FluctuationSample>> slots(lag_seconds.size());
    // snapshot args for the thread lambda
    std::vector<double> lags(lag_seconds.begin(), lag_seconds.end());
    parallel_for(lags.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            try {
                slots[i] = market::fluctuations(series, std::int64_t(std::llround(lags[i])),
                                                window, origin_stride);
            } catch (const error&) {
                slots[i] = std::nullopt;  // lag with no admissible origin
            }
        }
    });
    std::vector<market::FluctuationSample> out;
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

Curve mspd(const market::PriceSeries& series, std::span<const double> lag_seconds,
           const std::optional<market::WindowSpec>& window, std::int64_t origin_stride) {
    for (std::size_t i = 1; i < lag_seconds.size(); ++i)
        require(lag_seconds[i] > lag_seconds[i - 1], kModule,
                "lag grid must be strictly increasing");
    const auto samples = fluctuation_ladder(series, lag_seconds, window, origin_stride);
    Curve out;
    for (const auto& s : samples) {
        const Moments m = sample_moments(s.deltas);
        out.lags_seconds.push_back(double(s.lag_seconds));
        out.values.push_back(m.m2);
        out.counts.push_back(m.n);
    }
    out.validate();
    return out;
}

Curve sqt(std::span<const market::FluctuationSample> samples, Wavevector q) {
    require(q.q > 0, kModule, "wavevector must be positive");
    Curve out;
    for (const auto& s : samples) {
        double acc = 0.0;
        for (double d : s.deltas) acc += std::cos(q.q * d);
        const double value = s.lag_seconds == 0 ? 1.0 : acc / double(s.deltas.size());
        out.lags_seconds.push_back(double(s.lag_seconds));
        out.values.push_back(value);
        out.counts.push_back(std::int64_t(s.deltas.size()));
    }
    out.validate();
    return out;
}

Curve alpha2(std::span<const market::FluctuationSample> samples) {
    Curve out;
    for (const auto& s : samples) {
        const Moments m = sample_moments(s.deltas);
        require(m.m2 > 0, kModule, "degenerate window: zero second moment");
        out.lags_seconds.push_back(double(s.lag_seconds));
        out.values.push_back(m.m4 / (3.0 * m.m2 * m.m2) - 1.0);
        out.counts.push_back(m.n);
    }
    out.validate();
    return out;
}

Wavevector wavevector_from_localization(double r_l) {
    require(r_l > 0, kModule, "localization length must be positive");
    return Wavevector{2.0 * pi / (10.0 * r_l)};
}

} // namespace glassfx::obs
