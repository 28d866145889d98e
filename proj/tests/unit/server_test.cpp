// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/server.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "fixtures.hpp"
#include "httplib.h"
#include "json.hpp"
#include "keysave/bidirectional.hpp"
#include "keysave/ngram.hpp"

namespace keysave {
namespace {

using Json = nlohmann::json;

class ApiTest : public ::testing::Test {
 protected:
  ApiTest() {
    std::vector<std::string> words;
    for (int i = 0; i < 12; ++i) words.push_back(" t" + std::to_string(i));
    vocab_ = std::make_shared<Vocabulary>(testing::MakeVocab(words));
    std::vector<TokenSequence> seqs;
    for (int r = 0; r < 5; ++r) {
      TokenSequence s;
      for (int i = 0; i < 12; ++i) s.push_back(257 + (i * (r + 1)) % 12);
      seqs.push_back(s);
    }
    model_ = std::make_shared<NgramModel>(NgramModel::Train(seqs, vocab_->size()));
    store_.RegisterModel(
        "ngram", {std::make_shared<BidirectionalPredictor>(
                      BidirectionalPredictor::Dual(model_, model_)),
                  vocab_});
  }

  Json Call(const std::string& method, const std::string& path,
            const std::string& body = "", int want = 200) {
    const auto r = api_.Handle({method, path, body});
    EXPECT_EQ(r.status, want) << method << ' ' << path << " -> " << r.body;
    auto j = Json::parse(r.body);
    EXPECT_EQ(j.value("schema_version", 0), kSchemaVersion);
    return j;
  }

  std::string NewSession(const std::string& body = "{}") {
    return Call("POST", "/v1/sessions", body, 201)["session_id"];
  }

  std::shared_ptr<Vocabulary> vocab_;
  std::shared_ptr<NgramModel> model_;
  SessionStore store_;
  Api api_{store_, "ngram"};
};

TEST_F(ApiTest, Health) {
  const auto j = Call("GET", "/v1/health");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["models"], Json::array({"ngram"}));
}

TEST_F(ApiTest, CreateAndFetch) {
  const auto j = Call("POST", "/v1/sessions",
                      R"({"design": "legacy", "direction": "backward", "k": 4})", 201);
  EXPECT_EQ(j["design"], "legacy");
  EXPECT_EQ(j["direction"], "backward");
  EXPECT_EQ(j["k"], 4);
  EXPECT_EQ(j["ledger"]["actual"], 0);
  EXPECT_TRUE(j["ae"].is_null());
  EXPECT_FALSE(j["ae_defined"].get<bool>());
  const auto again = Call("GET", "/v1/sessions/" + j["session_id"].get<std::string>());
  EXPECT_EQ(again["session_id"], j["session_id"]);
  EXPECT_NE(NewSession(), NewSession());
}

TEST_F(ApiTest, SuggestionsCarryDigitLabels) {
  const auto id = NewSession();
  const auto j = Call("GET", "/v1/sessions/" + id + "/suggestions");
  ASSERT_EQ(j["candidates"].size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(j["candidates"][i]["label"], i);
    EXPECT_EQ(j["candidates"][i]["rank"], i + 1);
  }
  const auto unigram = model_->PredictNext({}, 10);
  EXPECT_EQ(j["candidates"][0]["id"], unigram.candidates[0].id);
  EXPECT_EQ(j["candidates"][0]["surface"],
            std::string(vocab_->Surface(unigram.candidates[0].id).surface));
}

TEST_F(ApiTest, EventsUpdateTheLedger) {
  const auto id = NewSession();
  const auto sugg = Call("GET", "/v1/sessions/" + id + "/suggestions");
  const std::string surface = sugg["candidates"][5]["surface"];
  auto j = Call("POST", "/v1/sessions/" + id + "/events",
                R"({"type": "digit", "value": 5})");
  EXPECT_EQ(j["ledger"]["actual"], 1);
  EXPECT_EQ(j["text"], surface.substr(1));
  j = Call("POST", "/v1/sessions/" + id + "/events", R"({"type": "char", "value": "z"})");
  EXPECT_EQ(j["ledger"]["actual"], 2);
  EXPECT_TRUE(j["ae_defined"].get<bool>());
  j = Call("POST", "/v1/sessions/" + id + "/events", R"({"type": "toggle"})");
  EXPECT_EQ(j["direction"], "backward");
  j = Call("POST", "/v1/sessions/" + id + "/events", R"({"type": "backspace"})");
  EXPECT_EQ(j["events"], 4);
  j = Call("POST", "/v1/sessions/" + id + "/events", R"({"type": "digit", "value": "0"})");
  EXPECT_EQ(j["events"], 5);
}

TEST_F(ApiTest, RejectedDigitReturnsConflictWithState) {
  const auto id = NewSession(R"({"k": 4})");
  auto before = Call("GET", "/v1/sessions/" + id);
  before.erase("schema_version");
  const auto j = Call("POST", "/v1/sessions/" + id + "/events",
                      R"({"type": "digit", "value": 9})", 409);
  EXPECT_EQ(j["error"]["code"], "event_rejected");
  EXPECT_EQ(j["session"], before);
}

TEST_F(ApiTest, ErrorStatuses) {
  Call("GET", "/v1/sessions/nope", "", 404);
  Call("GET", "/v1/unknown", "", 404);
  Call("POST", "/v1/sessions", "{not json", 400);
  Call("POST", "/v1/sessions", R"({"model": "gpt"})", 404);
  Call("POST", "/v1/sessions", R"({"k": 50})", 400);
  const auto id = NewSession();
  Call("POST", "/v1/sessions/" + id + "/events", R"({"type": "wiggle"})", 400);
  Call("POST", "/v1/sessions/" + id + "/events", R"({"type": "digit", "value": 12})", 400);
  Call("POST", "/v1/predict", R"({"context": [99999], "direction": "forward", "k": 3})", 400);
}

TEST_F(ApiTest, PredictEndpoint) {
  const auto j = Call("POST", "/v1/predict",
                      R"({"context": [257, 258], "direction": "forward", "k": 3})");
  const TokenSequence ctx = {257, 258};
  const auto want = model_->PredictNext(ctx, 3);
  ASSERT_EQ(j["candidates"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(j["candidates"][i]["id"], want.candidates[i].id);
  }
}

TEST_F(ApiTest, LiveHttpServer) {
  HttpServer server(store_, "ngram");
  const int port = server.BindToAnyPort("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.ListenAfterBind(); });
  httplib::Client client("127.0.0.1", port);
  for (int i = 0; i < 100 && !server.is_running(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  auto res = client.Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)["schema_version"], kSchemaVersion);
  res = client.Post("/v1/sessions", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const std::string id = Json::parse(res->body)["session_id"];
  res = client.Post("/v1/sessions/" + id + "/events",
                    R"({"type": "digit", "value": 9})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client.Get("/v1/sessions/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(Json::parse(res->body)["ledger"]["actual"], 1);
  res = client.Get("/v1/sessions/missing");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  server.Stop();
  loop.join();
}

}  // namespace
}  // namespace keysave
