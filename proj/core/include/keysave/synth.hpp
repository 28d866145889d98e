// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_SYNTH_HPP_
#define KEYSAVE_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "keysave/corpus.hpp"

namespace keysave {

struct SynthOptions {
  // Generation stops once the claim texts reach this many bytes.
  std::size_t target_bytes = 2 * 1024 * 1024;
  std::uint64_t seed = 2023;
};

// Deterministic patent-style claim sets (one independent claim followed by
// dependent claims per patent) drawn from a small technical grammar, with
// CPC tags and grant years. Used for desk-scale experiments and tests.
std::vector<ClaimRecord> GenerateSyntheticClaims(const SynthOptions& options);

}  // namespace keysave

#endif  // KEYSAVE_SYNTH_HPP_
