#pragma once

// Command-line front end. run_cli is the whole program minus process
// plumbing, so it can be driven in-process by tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace chaoslab {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kInternal = 1;
inline constexpr int kOutsideWindow = 2;
inline constexpr int kUsage = 64;
inline constexpr int kCannotWrite = 73;
}  // namespace exit_code

/// Subcommands: classify, sweep, certify, orbit, verify. `args` excludes
/// the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaoslab
