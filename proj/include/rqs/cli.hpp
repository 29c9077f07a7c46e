#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rqs::cli {

//! Exit codes: 0 success, 2 configuration error, 3 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

//! Runs the command line given as argv[1..]; testable without a process.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

//! "start:stop:step" (inclusive), "v1,v2,v3" or a single value.
std::vector<double> parse_grid(const std::string& text);

}  // namespace rqs::cli
