// Copyright 2026 The trajlabel Authors
// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "trajlabel/cli.hpp"

int main(int argc, char ** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return trajlabel::cli_dispatch(args);
}
