// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_PREDICTOR_HPP_
#define KEYSAVE_PREDICTOR_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "keysave/tokenizer.hpp"

namespace keysave {

enum class Direction { kForward, kBackward };

std::string_view DirectionName(Direction direction);
Direction ParseDirection(std::string_view name);
inline Direction Opposite(Direction d) {
  return d == Direction::kForward ? Direction::kBackward : Direction::kForward;
}

struct Candidate {
  TokenId id = 0;
  double score = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Ranked top-k candidates. Rank r (1-based) is candidates[r - 1].
struct Prediction {
  std::vector<Candidate> candidates;
  Direction direction = Direction::kForward;

  // 1-based rank of `id`, or nullopt when it is not among the candidates.
  std::optional<std::size_t> RankOf(TokenId id) const;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Throws DataError unless `p` has exactly k candidates with distinct ids,
// non-negative non-increasing scores, and ascending ids among equal scores.
void ValidatePrediction(const Prediction& p, std::size_t k);

// Orders candidates by descending score then ascending id.
void SortCandidates(std::vector<Candidate>& candidates);

// Anything that can rank next (forward) or previous (backward) tokens.
//
// `context` is always in natural reading order. For backward queries the
// candidates are tokens predicted to precede context.front().
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Prediction Predict(std::span<const TokenId> context,
                             Direction direction, std::size_t k) const = 0;
};

// Replays scripted predictions. Step n is the n-th Predict call (1-based);
// Reset() rewinds. Querying an unscripted step throws UsageError.
class ScriptedPredictor final : public Predictor {
 public:
  explicit ScriptedPredictor(std::map<std::size_t, Prediction> script);

  Prediction Predict(std::span<const TokenId> context, Direction direction,
                     std::size_t k) const override;

  void Reset();
  std::size_t calls() const;

 private:
  std::map<std::size_t, Prediction> script_;
  mutable std::mutex mu_;
  mutable std::size_t calls_ = 0;
};

}  // namespace keysave

#endif  // KEYSAVE_PREDICTOR_HPP_
