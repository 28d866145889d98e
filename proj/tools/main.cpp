// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return keysave::cli::Run(argc, argv, std::cout, std::cerr);
}
