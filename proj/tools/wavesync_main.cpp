// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "wavesync/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return wavesync::cli::run(args, std::cout, std::cerr);
}
