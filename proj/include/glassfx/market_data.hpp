#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace glassfx::market {

/**
 * Timestamped price trajectory on a nominal uniform grid with explicit
 * gaps: timestamps are strictly increasing and consecutive ones differ by
 * a positive integer multiple of nominal_step. Gaps (weekends, feed
 * outages) are represented as missing grid points and are never
 * interpolated.
 */
struct PriceSeries {
    std::vector<std::int64_t> epoch_times;  ///< seconds since Unix epoch
    std::vector<double> prices;             ///< finite, > 0
    std::int64_t nominal_step = 60;         ///< seconds

    std::size_t size() const { return epoch_times.size(); }
    void validate() const;
};

/**
 * Wall-clock anchor for de-aggregated daily analysis. The UTC offset is
 * explicit so no timezone database is needed; New York time is
 * utc_offset_minutes = -300 (EST) or -240 (EDT).
 */
struct WindowSpec {
    int origin_minute_of_day = 0;         ///< local clock, hh*60 + mm
    int utc_offset_minutes = 0;
    std::int64_t horizon_seconds = 86400;
    bool skip_weekends = true;

    void validate() const;
};

/// Price differences p(t0 + lag) - p(t0) over admissible origins, in
/// origin order.
struct FluctuationSample {
    std::int64_t lag_seconds = 0;
    std::vector<double> deltas;
    std::int64_t origin_count = 0;  ///< == deltas.size()
};

enum class QuoteFormat { minute_ascii, generic_csv };

struct ParseOptions {
    QuoteFormat format = QuoteFormat::generic_csv;
    /// UTC offset carried by the file's local timestamps (minute-ascii only)
    int utc_offset_minutes = 0;
    std::int64_t nominal_step = 60;
};

/// Days since 1970-01-01 of a proleptic Gregorian date.
std::int64_t days_from_civil(int y, int m, int d);

std::int64_t civil_to_epoch(int y, int m, int d, int hh, int mm, int ss);

/// 0 = Sunday .. 6 = Saturday for the local clock at the given offset.
int local_weekday(std::int64_t epoch, int utc_offset_minutes);

/**
 * Parses raw quote bytes into a clean PriceSeries.
 *
 * minute-ascii lines are "YYYYMMDD HHMMSS;open;high;low;close;volume"
 * (no header); the close is the series value and timestamps are local to
 * the declared UTC offset. generic-csv lines are "epoch_seconds,price"
 * with an optional "time,price" header. Malformed rows, duplicate or
 * non-monotonic timestamps, and off-grid gaps are reported with their row
 * number.
 */
PriceSeries parse_quote_file(std::string_view bytes, const ParseOptions& opt);

/**
 * One delta per origin where both endpoints exist; pairs spanning a gap
 * produce no sample. Without a window every grid origin is used, thinned
 * by origin_stride grid steps (1 = every origin, i.e. overlapping
 * samples). With a window, origins are the daily clock anchors and lag
 * must not exceed the horizon. Raises when no origin qualifies.
 */
FluctuationSample fluctuations(const PriceSeries& series, std::int64_t lag_seconds,
                               const std::optional<WindowSpec>& window = std::nullopt,
                               std::int64_t origin_stride = 1);

/**
 * Splits the series into per-day segments [anchor, anchor + horizon), one
 * per calendar day whose anchor instant exists in the data. Weekend
 * anchors are skipped when skip_weekends, and windows running past the
 * end of the data are dropped rather than truncated.
 */
std::vector<PriceSeries> daily_windows(const PriceSeries& series, const WindowSpec& window);

/// Anchor instants selected by daily_windows, in epoch seconds.
std::vector<std::int64_t> window_anchors(const PriceSeries& series, const WindowSpec& window);

} // namespace glassfx::market
