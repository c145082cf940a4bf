#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glassfx {

/// Library-wide error type. The message carries the subsystem that raised
/// it, e.g. "market-data: duplicate timestamp at row 17", so the CLI can
/// surface module-tagged diagnostics.
class error : public std::runtime_error {
public:
    error(std::string_view subsystem, std::string_view what)
        : std::runtime_error(std::string(subsystem) + ": " + std::string(what)) {}
};

[[noreturn]] inline void fail(std::string_view subsystem, std::string_view what) {
    throw error(subsystem, what);
}

inline void require(bool cond, std::string_view subsystem, std::string_view what) {
    if (!cond) fail(subsystem, what);
}

} // namespace glassfx
