// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_SRC_RANDOM_HPP_
#define KEYSAVE_SRC_RANDOM_HPP_

#include <cstdint>
#include <random>

namespace keysave::internal {

// Unbiased draw in [0, bound). std::uniform_int_distribution is
// implementation-defined; this keeps seeded outputs identical everywhere.
inline std::uint64_t UniformIndex(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace keysave::internal

#endif  // KEYSAVE_SRC_RANDOM_HPP_
