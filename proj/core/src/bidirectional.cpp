// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/bidirectional.hpp"

#include <vector>

#include "keysave/error.hpp"

namespace keysave {

BidirectionalPredictor::BidirectionalPredictor(
    Mode mode, std::shared_ptr<const SequenceModel> fwd,
    std::shared_ptr<const SequenceModel> bwd, std::optional<TokenId> marker)
    : mode_(mode),
      forward_(std::move(fwd)),
      backward_(std::move(bwd)),
      backward_marker_(marker) {}

BidirectionalPredictor BidirectionalPredictor::Dual(
    std::shared_ptr<const SequenceModel> forward,
    std::shared_ptr<const SequenceModel> backward) {
  if (!forward && !backward) {
    throw UsageError("a dual predictor needs at least one model");
  }
  return BidirectionalPredictor(Mode::kDual, std::move(forward),
                                std::move(backward), std::nullopt);
}

BidirectionalPredictor BidirectionalPredictor::Mixed(
    std::shared_ptr<const SequenceModel> model,
    std::optional<TokenId> backward_marker) {
  if (!model) throw UsageError("a mixed predictor needs a model");
  auto bwd = model;
  return BidirectionalPredictor(Mode::kMixed, std::move(model), std::move(bwd),
                                backward_marker);
}

bool BidirectionalPredictor::Supports(Direction direction) const {
  return direction == Direction::kForward ? forward_ != nullptr
                                          : backward_ != nullptr;
}

std::size_t BidirectionalPredictor::vocab_size() const {
  return forward_ ? forward_->vocab_size() : backward_->vocab_size();
}

Prediction BidirectionalPredictor::Predict(std::span<const TokenId> context,
                                           Direction direction,
                                           std::size_t k) const {
  if (!Supports(direction)) {
    throw UsageError(std::string("predictor has no ") +
                     std::string(DirectionName(direction)) + " model");
  }
  if (direction == Direction::kForward) {
    auto p = forward_->PredictNext(context, k);
    p.direction = Direction::kForward;
    return p;
  }
  std::vector<TokenId> reversed;
  reversed.reserve(context.size() + 1);
  if (mode_ == Mode::kMixed && backward_marker_) {
    reversed.push_back(*backward_marker_);
  }
  reversed.insert(reversed.end(), context.rbegin(), context.rend());
  auto p = backward_->PredictNext(reversed, k);
  p.direction = Direction::kBackward;
  return p;
}

}  // namespace keysave
