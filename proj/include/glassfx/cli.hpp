#pragma once

#include <string>
#include <vector>

namespace glassfx::cli {

inline constexpr const char* version = "0.1.0";

/**
 * Runs one CLI invocation; args exclude the program name. Returns 0 on
 * success, 1 on data errors, 2 on usage errors. Every output set is
 * written atomically together with a manifest.json describing the run;
 * identical arguments and inputs produce byte-identical outputs.
 */
int run(const std::vector<std::string>& args);

} // namespace glassfx::cli
