// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/ae_engine.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace keysave {
namespace {

[[noreturn]] void RethrowAtStep(std::size_t step, Direction direction) {
  const std::string where = "prediction failed at " +
                            std::string(DirectionName(direction)) +
                            " step " + std::to_string(step) + ": ";
  try {
    throw;
  } catch (const NetworkError& e) {
    throw NetworkError(where + e.what());
  } catch (const DataError& e) {
    throw DataError(where + e.what());
  } catch (const UsageError& e) {
    throw UsageError(where + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + e.what());
  }
}

}  // namespace

std::string_view DesignName(UiDesign design) {
  return design == UiDesign::kDigitKeys ? "digit" : "legacy";
}

UiDesign ParseDesign(std::string_view name) {
  if (name == "digit") return UiDesign::kDigitKeys;
  if (name == "legacy") return UiDesign::kLegacyArrowTab;
  throw UsageError("unknown UI design '" + std::string(name) + "'");
}

std::size_t ManualCost(const Vocabulary& vocab, TokenId id) {
  return vocab.Surface(id).stripped_length;
}

std::size_t SelectionCost(UiDesign design, std::size_t rank, std::size_t k) {
  if (rank < 1 || rank > k) {
    throw UsageError("rank " + std::to_string(rank) + " outside [1, " +
                     std::to_string(k) + "]");
  }
  return design == UiDesign::kDigitKeys ? 1 : rank;
}

KeystrokeLedger EvaluateLeg(const Predictor& predictor, const Vocabulary& vocab,
                            std::span<const TokenId> seq, Direction direction,
                            UiDesign design, const EngineOptions& options,
                            std::size_t first_counted) {
  KeystrokeLedger ledger;
  std::vector<TokenId> prompt;
  for (std::size_t i = std::max<std::size_t>(first_counted, 1); i < seq.size();
       ++i) {
    const TokenId next = seq[i];
    const std::size_t manual = ManualCost(vocab, next);
    if (manual == 0 && options.skip_empty_tokens) continue;

    const std::size_t begin =
        i > options.max_context ? i - options.max_context : 0;
    // The predictor takes reading order; backward legs hold reversed text.
    if (direction == Direction::kForward) {
      prompt.assign(seq.begin() + begin, seq.begin() + i);
    } else {
      prompt.assign(std::make_reverse_iterator(seq.begin() + i),
                    std::make_reverse_iterator(seq.begin() + begin));
    }
    Prediction prediction;
    try {
      prediction = predictor.Predict(prompt, direction, options.k);
    } catch (...) {
      RethrowAtStep(i, direction);
    }

    const auto rank = prediction.RankOf(next);
    if (rank && *rank <= options.k) {
      std::size_t cost = SelectionCost(design, *rank, options.k);
      if (options.cap_legacy_cost && design == UiDesign::kLegacyArrowTab) {
        cost = std::min(cost, manual);
      }
      ledger.keys_auto += cost;
      ++ledger.hits;
    } else {
      ledger.keys_auto += manual;
    }
    ledger.keys_manual += manual;
    ++ledger.tokens_counted;
  }
  return ledger;
}

AeResult Evaluate(const Predictor& predictor, const Vocabulary& vocab,
                  std::span<const TokenId> tokens, const TraversalPlan& plan,
                  UiDesign design, const EngineOptions& options) {
  const std::size_t t = tokens.size();
  if (t < 2) {
    throw UsageError("evaluation needs at least 2 tokens, got " +
                     std::to_string(t));
  }
  if (plan.start_index >= t) {
    throw UsageError("start index " + std::to_string(plan.start_index) +
                     " outside a text of " + std::to_string(t) + " tokens");
  }
  const std::size_t n = plan.start_index;
  const std::vector<TokenId> reversed(tokens.rbegin(), tokens.rend());
  KeystrokeLedger ledger;
  if (plan.first_leg == Direction::kForward) {
    // Leg 1: t_n .. t_m. Leg 2: t_m .. t_0 counting t_{n-1} .. t_0.
    ledger += EvaluateLeg(predictor, vocab, tokens.subspan(n),
                          Direction::kForward, design, options);
    ledger += EvaluateLeg(predictor, vocab, reversed, Direction::kBackward,
                          design, options, t - n);
  } else {
    // Leg 1: t_n .. t_0. Leg 2: t_0 .. t_m counting t_{n+1} .. t_m.
    const std::size_t seed_rev = t - 1 - n;
    ledger += EvaluateLeg(predictor, vocab,
                          std::span<const TokenId>(reversed).subspan(seed_rev),
                          Direction::kBackward, design, options);
    ledger += EvaluateLeg(predictor, vocab, tokens, Direction::kForward,
                          design, options, n + 1);
  }
  AeResult result;
  result.ledger = ledger;
  result.design = design;
  result.plan = plan;
  if (ledger.keys_manual > 0) result.ae_ratio = AeRatio(ledger);
  return result;
}

double AeRatio(const KeystrokeLedger& ledger) {
  if (ledger.keys_manual == 0) {
    throw UndefinedRatioError(
        "AE ratio undefined: no manual keystrokes were counted");
  }
  const auto saved = static_cast<double>(
      static_cast<std::int64_t>(ledger.keys_manual) -
      static_cast<std::int64_t>(ledger.keys_auto));
  return saved / static_cast<double>(ledger.keys_manual);
}

std::string_view PoolingName(Pooling pooling) {
  return pooling == Pooling::kMicro ? "micro" : "macro";
}

Pooling ParsePooling(std::string_view name) {
  if (name == "micro") return Pooling::kMicro;
  if (name == "macro") return Pooling::kMacro;
  throw UsageError("unknown pooling '" + std::string(name) + "'");
}

AeResult Aggregate(std::span<const AeResult> results, Pooling pooling) {
  if (results.empty()) throw UsageError("cannot aggregate zero results");
  AeResult pooled;
  pooled.design = results.front().design;
  pooled.plan = results.front().plan;
  double ratio_sum = 0.0;
  std::size_t defined = 0;
  for (const auto& r : results) {
    if (r.design != pooled.design) {
      throw UsageError("cannot aggregate results from different UI designs");
    }
    pooled.ledger += r.ledger;
    if (r.ae_ratio) {
      ratio_sum += *r.ae_ratio;
      ++defined;
    }
  }
  if (pooling == Pooling::kMicro) {
    if (pooled.ledger.keys_manual > 0) pooled.ae_ratio = AeRatio(pooled.ledger);
  } else if (defined > 0) {
    pooled.ae_ratio = ratio_sum / static_cast<double>(defined);
  }
  return pooled;
}

}  // namespace keysave
