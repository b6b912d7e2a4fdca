// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>

namespace ocdl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `ocdl` tool: subcommands train, eval, corrupt, export.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ocdl::cli
