#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace krrbw::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kCheckFailed = 1;  // verify: a claim reported violations
inline constexpr int kInputError = 2;
inline constexpr int kComputeError = 3;

// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes a static SVG of a sweep CSV (R^2 and sigma panels, mean line and
// 5th-95th percentile band per method).
void plot_sweep_svg(std::istream& sweep_csv, std::ostream& svg);

}  // namespace krrbw::cli
