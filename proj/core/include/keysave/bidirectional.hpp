// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_BIDIRECTIONAL_HPP_
#define KEYSAVE_BIDIRECTIONAL_HPP_

#include <memory>
#include <optional>

#include "keysave/ngram.hpp"
#include "keysave/predictor.hpp"

namespace keysave {

// Forward and backward prediction from either two direction-specific models
// (dual) or one model trained on forward and reversed copies (mixed).
// Backward queries feed the model the context reversed, so the model's
// "next" token is the token preceding the context in reading order.
class BidirectionalPredictor final : public Predictor {
 public:
  enum class Mode { kDual, kMixed };

  // Either model may be null, but not both. Querying a direction whose model
  // is missing throws UsageError.
  static BidirectionalPredictor Dual(
      std::shared_ptr<const SequenceModel> forward,
      std::shared_ptr<const SequenceModel> backward);
  // `backward_marker`, when set, is prepended to reversed contexts; it must
  // match the marker used when building the training sequences.
  static BidirectionalPredictor Mixed(
      std::shared_ptr<const SequenceModel> model,
      std::optional<TokenId> backward_marker = std::nullopt);

  Prediction Predict(std::span<const TokenId> context, Direction direction,
                     std::size_t k) const override;

  Mode mode() const { return mode_; }
  bool Supports(Direction direction) const;
  std::size_t vocab_size() const;

 private:
  BidirectionalPredictor(Mode mode, std::shared_ptr<const SequenceModel> fwd,
                         std::shared_ptr<const SequenceModel> bwd,
                         std::optional<TokenId> marker);

  Mode mode_;
  std::shared_ptr<const SequenceModel> forward_;
  std::shared_ptr<const SequenceModel> backward_;
  std::optional<TokenId> backward_marker_;
};

}  // namespace keysave

#endif  // KEYSAVE_BIDIRECTIONAL_HPP_
