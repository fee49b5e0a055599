#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace suspflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out` (or the configured output file), diagnostics and usage to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace suspflow
