#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ckg::cli {

// Entry point for the `ckg` tool. args[0] is the program name. Data goes to
// `out`, diagnostics to `err`; returns 0 iff nothing was written to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

// Shortest round-trip decimal, always with a fractional part ("100.0").
std::string format_number(double value);

}  // namespace ckg::cli
