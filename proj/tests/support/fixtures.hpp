// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

// Shared builders for tests. Nothing here reaches into library internals.

#ifndef KEYSAVE_TESTS_SUPPORT_FIXTURES_HPP_
#define KEYSAVE_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstddef>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "keysave/predictor.hpp"
#include "keysave/tokenizer.hpp"

namespace keysave::testing {

// Base layout (<unk> + 256 bytes) followed by `extra`, so the first extra
// surface gets id 257.
inline Vocabulary MakeVocab(const std::vector<std::string>& extra,
                            Scheme scheme = Scheme::kWhitespace) {
  std::vector<std::string> surfaces;
  surfaces.emplace_back("<unk>");
  for (int b = 0; b < 256; ++b) surfaces.emplace_back(1, static_cast<char>(b));
  surfaces.insert(surfaces.end(), extra.begin(), extra.end());
  return Vocabulary::FromSurfaces(scheme, surfaces);
}

inline TokenId FirstExtraId() { return 257; }

// k candidates with strictly decreasing scores. `target` sits at `rank`
// (1-based) or is absent when rank is 0. Fillers come from [257, vocab_size)
// and then from the byte ids, skipping the target.
inline Prediction RankedPrediction(TokenId target, std::size_t rank,
                                   std::size_t k, std::size_t vocab_size,
                                   Direction direction = Direction::kForward) {
  Prediction p;
  p.direction = direction;
  TokenId filler = 257;
  for (std::size_t pos = 1; pos <= k; ++pos) {
    TokenId id;
    if (pos == rank) {
      id = target;
    } else {
      for (;;) {
        if (filler >= vocab_size) filler = 1;
        if (filler != target) break;
        ++filler;
      }
      id = filler++;
    }
    if (id >= vocab_size || k > vocab_size - 1) {
      throw std::logic_error("vocabulary too small");
    }
    p.candidates.push_back({id, static_cast<double>(k - pos + 1)});
  }
  return p;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("keysave-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace keysave::testing

#endif  // KEYSAVE_TESTS_SUPPORT_FIXTURES_HPP_
