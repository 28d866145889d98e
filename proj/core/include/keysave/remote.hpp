// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_REMOTE_HPP_
#define KEYSAVE_REMOTE_HPP_

#include <chrono>
#include <string>

#include "keysave/predictor.hpp"

namespace keysave {

// Client for a prediction server speaking the /v1/predict JSON protocol:
//   request  {"context": [ids], "direction": "forward"|"backward", "k": n}
//   response {"candidates": [{"id": int, "score": number}, ...]}
//
// Responses longer than k are truncated; shorter ones are padded with unseen
// ids (ascending, score 0) below `vocab_size`. Every response must already
// satisfy the ranking invariants or DataError is thrown.
class RemotePredictor final : public Predictor {
 public:
  // `endpoint` is "http://host:port" optionally followed by a path; the path
  // defaults to /v1/predict.
  RemotePredictor(std::string endpoint, std::size_t vocab_size,
                  std::chrono::milliseconds timeout = std::chrono::seconds(30));

  Prediction Predict(std::span<const TokenId> context, Direction direction,
                     std::size_t k) const override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  std::string base_;
  std::string path_;
  std::size_t vocab_size_;
  std::chrono::milliseconds timeout_;
};

// Wire helpers shared with the server.
std::string EncodePredictRequest(std::span<const TokenId> context,
                                 Direction direction, std::size_t k);
std::string EncodePredictResponse(const Prediction& prediction);
// Parses a response body, then truncates or pads to k. Throws DataError.
Prediction DecodePredictResponse(const std::string& body, Direction direction,
                                 std::size_t k, std::size_t vocab_size);

}  // namespace keysave

#endif  // KEYSAVE_REMOTE_HPP_
