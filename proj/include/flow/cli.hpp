#pragma once

// The `flow` command line: run, check, validate, serve, framerate, tour.

#include <iosfwd>
#include <string>
#include <vector>

namespace flow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // usage, I/O, or a failed check
inline constexpr int kExitInvalid = 2;     // scene, graph or trace failed validation
inline constexpr int kExitRuntimeFault = 3;

/// `args` excludes the program name.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flow::cli
