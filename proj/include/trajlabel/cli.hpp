// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace trajlabel
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one CLI invocation. `args` excludes the program name.
/// Subcommands: simulate, track, forecast, enhance, eval, pipeline, export.
int cli_dispatch(const std::vector<std::string> & args);

}  // namespace trajlabel
