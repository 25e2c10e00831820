#pragma once

#include <iosfwd>

namespace sicmos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitStageAbort = 4;

/// Runs the command line in-process. Standard output goes to `out`,
/// diagnostics and usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sicmos::cli
