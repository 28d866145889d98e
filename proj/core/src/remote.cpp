// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/remote.hpp"

#include <set>

#include "httplib.h"
#include "json.hpp"
#include "keysave/error.hpp"

namespace keysave {

std::string EncodePredictRequest(std::span<const TokenId> context,
                                 Direction direction, std::size_t k) {
  nlohmann::ordered_json j;
  j["context"] = std::vector<TokenId>(context.begin(), context.end());
  j["direction"] = DirectionName(direction);
  j["k"] = k;
  return j.dump();
}

std::string EncodePredictResponse(const Prediction& prediction) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["direction"] = DirectionName(prediction.direction);
  auto& list = j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : prediction.candidates) {
    list.push_back({{"id", c.id}, {"score", c.score}});
  }
  return j.dump();
}

Prediction DecodePredictResponse(const std::string& body, Direction direction,
                                 std::size_t k, std::size_t vocab_size) {
  Prediction p;
  p.direction = direction;
  try {
    const auto j = nlohmann::json::parse(body);
    for (const auto& item : j.at("candidates")) {
      const auto id = item.at("id").get<std::int64_t>();
      if (id < 0 || static_cast<std::uint64_t>(id) >= vocab_size) {
        throw DataError("candidate id " + std::to_string(id) +
                        " outside the vocabulary");
      }
      p.candidates.push_back(
          {static_cast<TokenId>(id), item.at("score").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed prediction response: ") + e.what());
  }
  ValidatePrediction(p, p.candidates.size());
  if (p.candidates.size() > k) p.candidates.resize(k);
  if (p.candidates.size() < k) {
    std::set<TokenId> present;
    for (const auto& c : p.candidates) present.insert(c.id);
    for (TokenId id = 0; p.candidates.size() < k && id < vocab_size; ++id) {
      if (!present.count(id)) p.candidates.push_back({id, 0.0});
    }
    SortCandidates(p.candidates);
  }
  ValidatePrediction(p, k);
  return p;
}

RemotePredictor::RemotePredictor(std::string endpoint, std::size_t vocab_size,
                                 std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), vocab_size_(vocab_size),
      timeout_(timeout) {
  const auto scheme_end = endpoint_.find("://");
  const auto path_start = endpoint_.find(
      '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = endpoint_;
    path_ = "/v1/predict";
  } else {
    base_ = endpoint_.substr(0, path_start);
    path_ = endpoint_.substr(path_start);
  }
}

Prediction RemotePredictor::Predict(std::span<const TokenId> context,
                                    Direction direction,
                                    std::size_t k) const {
  if (k == 0 || k > vocab_size_) {
    throw UsageError("k = " + std::to_string(k) + " invalid for vocabulary " +
                     std::to_string(vocab_size_));
  }
  httplib::Client client(base_);
  if (!client.is_valid()) {
    throw NetworkError("invalid predictor endpoint '" + endpoint_ + "'");
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Post(path_, EncodePredictRequest(context, direction, k),
                         "application/json");
  if (!res) {
    throw NetworkError("predictor endpoint '" + endpoint_ +
                       "' unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw NetworkError("predictor endpoint '" + endpoint_ + "' returned HTTP " +
                       std::to_string(res->status));
  }
  try {
    return DecodePredictResponse(res->body, direction, k, vocab_size_);
  } catch (const DataError& e) {
    throw DataError("predictor endpoint '" + endpoint_ + "': " + e.what());
  }
}

}  // namespace keysave
