#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "multiseg/error.hpp"

namespace multiseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitEvaluation = 4;

/// Exit code for an error raised while running a subcommand.
int exit_code(ErrorCode code) noexcept;

/// Runs the tool; args exclude the program name. Results go to `out` unless
/// --out is given, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace multiseg::cli
