// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/predictor.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "keysave/error.hpp"

namespace keysave {

std::string_view DirectionName(Direction direction) {
  return direction == Direction::kForward ? "forward" : "backward";
}

Direction ParseDirection(std::string_view name) {
  if (name == "forward") return Direction::kForward;
  if (name == "backward") return Direction::kBackward;
  throw UsageError("unknown direction '" + std::string(name) + "'");
}

std::optional<std::size_t> Prediction::RankOf(TokenId id) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].id == id) return i + 1;
  }
  return std::nullopt;
}

void SortCandidates(std::vector<Candidate>& candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
}

void ValidatePrediction(const Prediction& p, std::size_t k) {
  if (p.candidates.size() != k) {
    throw DataError("prediction has " + std::to_string(p.candidates.size()) +
                    " candidates, expected " + std::to_string(k));
  }
  std::set<TokenId> ids;
  for (std::size_t i = 0; i < p.candidates.size(); ++i) {
    const auto& c = p.candidates[i];
    if (!ids.insert(c.id).second) {
      throw DataError("prediction repeats token id " + std::to_string(c.id));
    }
    if (!(c.score >= 0.0)) {
      throw DataError("prediction score at rank " + std::to_string(i + 1) +
                      " is negative or NaN");
    }
    if (i > 0) {
      const auto& prev = p.candidates[i - 1];
      if (c.score > prev.score ||
          (c.score == prev.score && c.id < prev.id)) {
        throw DataError("prediction is not ranked at rank " +
                        std::to_string(i + 1));
      }
    }
  }
}

ScriptedPredictor::ScriptedPredictor(std::map<std::size_t, Prediction> script)
    : script_(std::move(script)) {}

Prediction ScriptedPredictor::Predict(std::span<const TokenId>, Direction,
                                      std::size_t k) const {
  std::lock_guard lock(mu_);
  const std::size_t step = ++calls_;
  auto it = script_.find(step);
  if (it == script_.end()) {
    throw UsageError("scripted predictor has no prediction for step " +
                     std::to_string(step));
  }
  if (it->second.candidates.size() != k) {
    throw UsageError("scripted prediction for step " + std::to_string(step) +
                     " has " + std::to_string(it->second.candidates.size()) +
                     " candidates, caller asked for " + std::to_string(k));
  }
  return it->second;
}

void ScriptedPredictor::Reset() {
  std::lock_guard lock(mu_);
  calls_ = 0;
}

std::size_t ScriptedPredictor::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

}  // namespace keysave
