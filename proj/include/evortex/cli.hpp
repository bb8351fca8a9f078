// cli.hpp - batch command-line front end (synth / simulate / gouy / fit)
#ifndef EVORTEX_CLI_HPP
#define EVORTEX_CLI_HPP

#include <string>
#include <vector>

namespace evortex::cli {

inline constexpr const char* tool_version = "evortex 1.0.0";

/// Runs one command given argv[1..]. Exit codes: 0 ok, 2 validation,
/// 3 numerical/sampling, 4 fit domain, 1 unexpected failure.
int run(const std::vector<std::string>& args);

} // namespace evortex::cli

#endif
