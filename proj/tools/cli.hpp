// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_TOOLS_CLI_HPP_
#define KEYSAVE_TOOLS_CLI_HPP_

#include <iosfwd>

namespace keysave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRuntime = 3;

// Entry point of the `ae` tool. Results go to `out`, diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace keysave::cli

#endif  // KEYSAVE_TOOLS_CLI_HPP_
