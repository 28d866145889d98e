// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_AE_ENGINE_HPP_
#define KEYSAVE_AE_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "keysave/error.hpp"
#include "keysave/predictor.hpp"
#include "keysave/tokenizer.hpp"

namespace keysave {

// How a user picks one of the top-k suggestions.
//   kLegacyArrowTab: (rank - 1) down-arrow presses plus tab = rank keys.
//   kDigitKeys:      one key 0..9 regardless of rank.
enum class UiDesign { kLegacyArrowTab, kDigitKeys };

std::string_view DesignName(UiDesign design);
UiDesign ParseDesign(std::string_view name);

struct KeystrokeLedger {
  std::uint64_t keys_auto = 0;
  std::uint64_t keys_manual = 0;
  std::uint64_t tokens_counted = 0;
  std::uint64_t hits = 0;

  KeystrokeLedger& operator+=(const KeystrokeLedger& other) {
    keys_auto += other.keys_auto;
    keys_manual += other.keys_manual;
    tokens_counted += other.tokens_counted;
    hits += other.hits;
    return *this;
  }
  friend bool operator==(const KeystrokeLedger&,
                         const KeystrokeLedger&) = default;
};

// Where a traversal starts and which way it goes first. Index n = 0 going
// forward is the classic left-to-right run; n = T-1 going backward is the
// right-to-left run. Interior starts cover the text in two legs.
struct TraversalPlan {
  std::size_t start_index = 0;
  Direction first_leg = Direction::kForward;

  static TraversalPlan Forward() { return {0, Direction::kForward}; }
  static TraversalPlan Backward(std::size_t token_count) {
    return {token_count - 1, Direction::kBackward};
  }
  friend bool operator==(const TraversalPlan&, const TraversalPlan&) = default;
};

struct EngineOptions {
  std::size_t k = 10;
  // Prompts longer than this keep only the most recent tokens.
  std::size_t max_context = 1024;
  // Do not count steps whose token has zero manual cost.
  bool skip_empty_tokens = false;
  // Legacy selection costs min(rank, manual cost) instead of rank.
  bool cap_legacy_cost = false;
};

class UndefinedRatioError : public DataError {
 public:
  using DataError::DataError;
};

struct AeResult {
  KeystrokeLedger ledger;
  // Absent when keys_manual is 0.
  std::optional<double> ae_ratio;
  UiDesign design = UiDesign::kDigitKeys;
  TraversalPlan plan;
};

// Stripped surface length of the token.
std::size_t ManualCost(const Vocabulary& vocab, TokenId id);

// Keystrokes to accept the suggestion at 1-based `rank`; throws UsageError
// unless 1 <= rank <= k.
std::size_t SelectionCost(UiDesign design, std::size_t rank, std::size_t k);

// One left-to-right pass over `seq`, which is already in the order the user
// writes it (reversed for backward legs). For i in [first_counted, len): the
// prompt is seq[0, i), the true token is seq[i]. A top-k hit costs the
// selection cost, a miss costs the manual cost, and keys_manual always grows
// by the manual cost.
KeystrokeLedger EvaluateLeg(const Predictor& predictor, const Vocabulary& vocab,
                            std::span<const TokenId> seq, Direction direction,
                            UiDesign design, const EngineOptions& options,
                            std::size_t first_counted = 1);

// Runs a full traversal of `tokens` (reading order, at least 2 tokens).
//
// Forward-first from t_n: leg 1 writes t_n..t_m forward seeded by t_n; leg 2
// writes backward over t_m..t_0 with the whole leg-1 span as context and
// counts only t_{n-1}..t_0. Backward-first is the mirror image. The seed
// token is never counted, so tokens_counted is always T - 1 (unless empty
// tokens are skipped).
AeResult Evaluate(const Predictor& predictor, const Vocabulary& vocab,
                  std::span<const TokenId> tokens, const TraversalPlan& plan,
                  UiDesign design, const EngineOptions& options);

// (keys_manual - keys_auto) / keys_manual. Throws UndefinedRatioError when
// keys_manual is 0.
double AeRatio(const KeystrokeLedger& ledger);

enum class Pooling { kMicro, kMacro };

std::string_view PoolingName(Pooling pooling);
Pooling ParsePooling(std::string_view name);

// Micro sums ledgers then takes one ratio; macro averages per-result ratios
// (results with an undefined ratio are left out). Throws UsageError on an
// empty list or mixed designs.
AeResult Aggregate(std::span<const AeResult> results,
                   Pooling pooling = Pooling::kMicro);

}  // namespace keysave

#endif  // KEYSAVE_AE_ENGINE_HPP_
