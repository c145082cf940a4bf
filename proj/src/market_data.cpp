#include "glassfx/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "glassfx/errors.hpp"

namespace glassfx::market {

namespace {

constexpr const char* kModule = "market-data";

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(std::string_view s, std::int64_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

[[noreturn]] void reject_row(std::size_t row, std::string_view why) {
    fail(kModule, "row " + std::to_string(row) + ": " + std::string(why));
}

struct RecordSink {
    PriceSeries series;
    std::size_t rows_seen = 0;

    void push(std::int64_t t, double price, std::size_t row) {
        if (!std::isfinite(price) || price <= 0.0)
            reject_row(row, "price must be finite and positive");
        if (!series.epoch_times.empty()) {
            const std::int64_t prev = series.epoch_times.back();
            if (t == prev) reject_row(row, "duplicate timestamp");
            if (t < prev) reject_row(row, "non-monotonic timestamp");
            if ((t - prev) % series.nominal_step != 0)
                reject_row(row, "gap is not a multiple of the nominal step");
        }
        series.epoch_times.push_back(t);
        series.prices.push_back(price);
    }
};

void parse_minute_ascii_line(std::string_view line, std::size_t row, int utc_offset_minutes,
                             RecordSink& sink) {
    // "YYYYMMDD HHMMSS;open;high;low;close;volume"
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ';') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    if (fields.size() != 6) reject_row(row, "expected 6 ';'-separated fields");

    const std::string_view stamp = fields[0];
    if (stamp.size() != 15 || stamp[8] != ' ' || !all_digits(stamp.substr(0, 8)) ||
        !all_digits(stamp.substr(9, 6)))
        reject_row(row, "timestamp must be 'YYYYMMDD HHMMSS'");
    const int y = to_int(stamp.substr(0, 4));
    const int mo = to_int(stamp.substr(4, 2));
    const int d = to_int(stamp.substr(6, 2));
    const int hh = to_int(stamp.substr(9, 2));
    const int mi = to_int(stamp.substr(11, 2));
    const int ss = to_int(stamp.substr(13, 2));
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh > 23 || mi > 59 || ss > 59)
        reject_row(row, "timestamp out of range");

    double open, high, low, close;
    if (!parse_double(fields[1], open) || !parse_double(fields[2], high) ||
        !parse_double(fields[3], low) || !parse_double(fields[4], close))
        reject_row(row, "price fields must be finite numbers");
    if (fields[5].empty()) reject_row(row, "missing volume field");

    // local wall-clock -> UTC epoch
    const std::int64_t t = civil_to_epoch(y, mo, d, hh, mi, ss) -
                           std::int64_t(utc_offset_minutes) * 60;
    sink.push(t, close, row);
}

void parse_generic_csv_line(std::string_view line, std::size_t row, RecordSink& sink) {
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
        reject_row(row, "expected 'epoch_seconds,price'");
    std::int64_t t;
    double price;
    if (!parse_int(line.substr(0, comma), t)) reject_row(row, "bad epoch timestamp");
    if (!parse_double(line.substr(comma + 1), price)) reject_row(row, "bad price");
    sink.push(t, price, row);
}

bool is_generic_header(std::string_view line) {
    std::string lowered;
    lowered.reserve(line.size());
    for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c)))
            lowered.push_back(char(std::tolower(static_cast<unsigned char>(c))));
    return lowered == "time,price";
}

} // namespace

void PriceSeries::validate() const {
    require(nominal_step > 0, kModule, "nominal step must be positive");
    require(!epoch_times.empty(), kModule, "series is empty");
    require(epoch_times.size() == prices.size(), kModule, "times/prices size mismatch");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        require(std::isfinite(prices[i]) && prices[i] > 0.0, kModule,
                "prices must be finite and positive");
        if (i > 0) {
            const std::int64_t gap = epoch_times[i] - epoch_times[i - 1];
            require(gap > 0, kModule, "timestamps must be strictly increasing");
            require(gap % nominal_step == 0, kModule,
                    "gaps must be integer multiples of the nominal step");
        }
    }
}

void WindowSpec::validate() const {
    require(origin_minute_of_day >= 0 && origin_minute_of_day < 24 * 60, kModule,
            "window origin must lie in [00:00, 24:00)");
    require(horizon_seconds > 0, kModule, "window horizon must be positive");
}

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return std::int64_t(era) * 146097 + std::int64_t(doe) - 719468;
}

std::int64_t civil_to_epoch(int y, int m, int d, int hh, int mm, int ss) {
    return days_from_civil(y, m, d) * 86400 + hh * 3600 + mm * 60 + ss;
}

int local_weekday(std::int64_t epoch, int utc_offset_minutes) {
    const std::int64_t local = epoch + std::int64_t(utc_offset_minutes) * 60;
    const std::int64_t days = floor_div(local, 86400);
    return int(((days + 4) % 7 + 7) % 7);  // day 0 (1970-01-01) was a Thursday
}

PriceSeries parse_quote_file(std::string_view bytes, const ParseOptions& opt) {
    require(opt.nominal_step > 0, kModule, "nominal step must be positive");
    RecordSink sink;
    sink.series.nominal_step = opt.nominal_step;

    std::size_t row = 0;
    std::size_t pos = 0;
    bool header_checked = false;
    while (pos <= bytes.size()) {
        std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string_view::npos) eol = bytes.size();
        std::string_view line = bytes.substr(pos, eol - pos);
        pos = eol + 1;
        ++row;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (pos > bytes.size()) break;
            continue;
        }
        if (opt.format == QuoteFormat::generic_csv && !header_checked) {
            header_checked = true;
            if (is_generic_header(line)) continue;
        }
        if (opt.format == QuoteFormat::minute_ascii)
            parse_minute_ascii_line(line, row, opt.utc_offset_minutes, sink);
        else
            parse_generic_csv_line(line, row, sink);
        if (pos > bytes.size()) break;
    }
    require(!sink.series.epoch_times.empty(), kModule, "no records in quote file");
    sink.series.validate();
    return sink.series;
}

std::vector<std::int64_t> window_anchors(const PriceSeries& series, const WindowSpec& window) {
    series.validate();
    window.validate();
    const std::int64_t off = std::int64_t(window.utc_offset_minutes) * 60;
    const std::int64_t first = series.epoch_times.front();
    const std::int64_t last = series.epoch_times.back();
    require(last + series.nominal_step - first >= window.horizon_seconds, kModule,
            "series shorter than one window horizon");

    std::vector<std::int64_t> anchors;
    const std::int64_t first_day = floor_div(first + off, 86400);
    const std::int64_t last_day = floor_div(last + off, 86400);
    for (std::int64_t day = first_day; day <= last_day; ++day) {
        const std::int64_t anchor = day * 86400 + std::int64_t(window.origin_minute_of_day) * 60 - off;
        if (window.skip_weekends) {
            const int wd = local_weekday(anchor, window.utc_offset_minutes);
            if (wd == 0 || wd == 6) continue;
        }
        // anchor must be an observed grid point, and the full horizon must
        // fit inside the data span (truncated trailing windows are dropped)
        if (!std::binary_search(series.epoch_times.begin(), series.epoch_times.end(), anchor))
            continue;
        if (anchor + window.horizon_seconds > last + series.nominal_step) continue;
        anchors.push_back(anchor);
    }
    return anchors;
}

FluctuationSample fluctuations(const PriceSeries& series, std::int64_t lag_seconds,
                               const std::optional<WindowSpec>& window,
                               std::int64_t origin_stride) {
    series.validate();
    require(lag_seconds > 0 && lag_seconds % series.nominal_step == 0, kModule,
            "lag must be a positive multiple of the nominal step");
    require(origin_stride >= 1, kModule, "origin stride must be >= 1");

    const auto& t = series.epoch_times;
    auto price_at = [&](std::int64_t when, double& out) {
        auto it = std::lower_bound(t.begin(), t.end(), when);
        if (it == t.end() || *it != when) return false;
        out = series.prices[std::size_t(it - t.begin())];
        return true;
    };

    FluctuationSample sample;
    sample.lag_seconds = lag_seconds;

    if (window) {
        window->validate();
        require(lag_seconds <= window->horizon_seconds, kModule, "lag exceeds window horizon");
        for (std::int64_t anchor : window_anchors(series, *window)) {
            double p0, p1;
            if (price_at(anchor, p0) && price_at(anchor + lag_seconds, p1))
                sample.deltas.push_back(p1 - p0);
        }
    } else {
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::int64_t grid_index = (t[i] - t.front()) / series.nominal_step;
            if (grid_index % origin_stride != 0) continue;
            double p1;
            if (price_at(t[i] + lag_seconds, p1))
                sample.deltas.push_back(p1 - series.prices[i]);
        }
    }

    sample.origin_count = std::int64_t(sample.deltas.size());
    require(sample.origin_count > 0, kModule,
            "no valid origin: lag too large or data too sparse");
    return sample;
}

std::vector<PriceSeries> daily_windows(const PriceSeries& series, const WindowSpec& window) {
    const auto anchors = window_anchors(series, window);
    const auto& t = series.epoch_times;

    std::vector<PriceSeries> segments;
    for (std::int64_t anchor : anchors) {
        auto lo = std::lower_bound(t.begin(), t.end(), anchor);
        auto hi = std::lower_bound(t.begin(), t.end(), anchor + window.horizon_seconds);
        if (lo == hi) continue;
        PriceSeries seg;
        seg.nominal_step = series.nominal_step;
        seg.epoch_times.assign(lo, hi);
        const std::size_t b = std::size_t(lo - t.begin());
        const std::size_t e = std::size_t(hi - t.begin());
        seg.prices.assign(series.prices.begin() + b, series.prices.begin() + e);
        segments.push_back(std::move(seg));
    }
    require(!segments.empty(), kModule, "zero daily windows produced");
    return segments;
}

} // namespace glassfx::market
