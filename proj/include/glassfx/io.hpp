#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "glassfx/fitkit.hpp"
#include "glassfx/market_data.hpp"
#include "glassfx/observables.hpp"

namespace glassfx::io {

/// Curve table "lag,value,count" with lag in minutes (user-facing tables
/// are minute-labeled; seconds are internal).
std::string curve_csv(const obs::Curve& curve);
obs::Curve parse_curve_csv(std::string_view text);

/// Distribution table "x,y,n".
std::string distribution_csv(const obs::Distribution& dist);
obs::Distribution parse_distribution_csv(std::string_view text, obs::DistKind kind,
                                         double lag_minutes);

/// Price series table "time,price" (generic-csv, re-ingestable).
std::string series_csv(const market::PriceSeries& series);

std::string fit_result_json(const fit::FitResult& result);
std::string sqt_fit_json(const fit::SqtFitForm& form);

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

} // namespace glassfx::io
