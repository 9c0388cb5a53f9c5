// Copyright 2026 The text-scene-motion Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "tsm/cli/cli.hpp"

int main(int argc, char** argv) {
  return tsm::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
