// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/session.hpp"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "keysave/ae_engine.hpp"
#include "keysave/bidirectional.hpp"
#include "keysave/error.hpp"
#include "keysave/ngram.hpp"
#include "oracles.hpp"

namespace keysave {
namespace {

using testing::RankedPrediction;

// Returns the same ranking for every query.
class FixedPredictor final : public Predictor {
 public:
  explicit FixedPredictor(std::vector<TokenId> ids) : ids_(std::move(ids)) {}
  Prediction Predict(std::span<const TokenId>, Direction direction,
                     std::size_t k) const override {
    Prediction p;
    p.direction = direction;
    for (std::size_t i = 0; i < k && i < ids_.size(); ++i) {
      p.candidates.push_back({ids_[i], static_cast<double>(k - i)});
    }
    return p;
  }

 private:
  std::vector<TokenId> ids_;
};

class SessionTest : public ::testing::Test {
 protected:
  SessionTest() {
    std::vector<std::string> words;
    for (int i = 0; i < 9; ++i) words.push_back(" w" + std::to_string(i));
    words.push_back(" patent");
    vocab_ = std::make_shared<Vocabulary>(testing::MakeVocab(words));
    std::vector<TokenId> ids;
    for (int i = 0; i < 10; ++i) ids.push_back(257 + i);
    store_.RegisterModel("fixed", {std::make_shared<FixedPredictor>(ids), vocab_});
  }
  std::string Create(std::size_t k = 10, UiDesign design = UiDesign::kDigitKeys,
                     Direction direction = Direction::kForward) {
    return store_.Create({design, direction, k, "fixed"});
  }
  std::shared_ptr<Vocabulary> vocab_;
  SessionStore store_;
};

TEST_F(SessionTest, CreateFreshSessions) {
  const auto a = Create();
  const auto b = Create();
  EXPECT_NE(a, b);
  const auto s = store_.Snapshot(a);
  EXPECT_EQ(s.actual, 0u);
  EXPECT_EQ(s.manual_equivalent, 0u);
  EXPECT_FALSE(s.ae.has_value());
  EXPECT_EQ(s.text, "");
  EXPECT_EQ(store_.size(), 2u);
  EXPECT_THROW(store_.Create({UiDesign::kDigitKeys, Direction::kForward, 10, "nope"}),
               NotFoundError);
  EXPECT_THROW(Create(0), UsageError);
  EXPECT_THROW(Create(11), UsageError);
  EXPECT_THROW(store_.Snapshot("missing"), NotFoundError);
}

TEST_F(SessionTest, DigitFiveSelectsSixthSuggestion) {
  const auto id = Create();
  const auto surfaces = store_.SuggestionSurfaces(id);
  ASSERT_EQ(surfaces.size(), 10u);
  const auto s = store_.Apply(id, KeyEvent::Digit(5));
  EXPECT_EQ(s.actual, 1u);
  EXPECT_EQ(s.text, "w5");
  EXPECT_EQ(s.manual_equivalent, 2u);
}

TEST_F(SessionTest, AcceptingSixCharacterToken) {
  const auto id = Create();
  const auto s = store_.Apply(id, KeyEvent::Digit(9));
  EXPECT_EQ(s.text, "patent");
  EXPECT_EQ(s.manual_equivalent, 6u);
  EXPECT_EQ(s.actual, 1u);
  ASSERT_TRUE(s.ae);
  EXPECT_NEAR(*s.ae, 5.0 / 6.0, 1e-12);
}

TEST_F(SessionTest, LegacyDesignChargesRank) {
  const auto id = Create(10, UiDesign::kLegacyArrowTab);
  const auto s = store_.Apply(id, KeyEvent::Digit(5));
  EXPECT_EQ(s.actual, 6u);
}

TEST_F(SessionTest, OutOfRangeDigitLeavesStateAlone) {
  const auto id = Create(4);
  store_.Apply(id, KeyEvent::Char("x"));
  const auto before = store_.Snapshot(id);
  EXPECT_THROW(store_.Apply(id, KeyEvent::Digit(9)), EventRejectedError);
  EXPECT_EQ(store_.Snapshot(id), before);
  EXPECT_EQ(store_.EventLog(id).size(), 1u);
}

TEST_F(SessionTest, TypingCharacters) {
  const auto id = Create();
  auto s = store_.Apply(id, KeyEvent::Char("c"));
  EXPECT_EQ(s.actual, 1u);
  EXPECT_EQ(s.manual_equivalent, 1u);
  ASSERT_TRUE(s.ae);
  EXPECT_EQ(*s.ae, 0.0);
  s = store_.Apply(id, KeyEvent::Char(" "));
  EXPECT_EQ(s.actual, 2u);
  EXPECT_EQ(s.manual_equivalent, 1u);
  EXPECT_EQ(s.pending, "");
  s = store_.Apply(id, KeyEvent::Char("\xC3\xA9"));
  EXPECT_EQ(s.text, "c \xC3\xA9");
  EXPECT_EQ(s.manual_equivalent, 2u);
  EXPECT_THROW(store_.Apply(id, KeyEvent::Char("ab")), UsageError);
  EXPECT_THROW(store_.Apply(id, KeyEvent::Char("")), UsageError);
}

TEST_F(SessionTest, ManualTypingNeverSaves) {
  const auto id = Create();
  for (char c : std::string("claim one")) {
    const auto s = store_.Apply(id, KeyEvent::Char(std::string(1, c)));
    ASSERT_TRUE(s.ae);
    EXPECT_LE(*s.ae, 0.0);
  }
  // Without whitespace every character is also a manual keystroke.
  const auto solid = Create();
  SessionSnapshot s;
  for (char c : std::string("claim")) s = store_.Apply(solid, KeyEvent::Char(std::string(1, c)));
  EXPECT_EQ(*s.ae, 0.0);
}

TEST_F(SessionTest, Backspace) {
  const auto id = Create();
  store_.Apply(id, KeyEvent::Char("a"));
  store_.Apply(id, KeyEvent::Char("b"));
  auto s = store_.Apply(id, KeyEvent::Backspace());
  EXPECT_EQ(s.text, "a");
  EXPECT_EQ(s.pending, "a");
  EXPECT_EQ(s.actual, 3u);
  EXPECT_EQ(s.manual_equivalent, 1u);
}

TEST_F(SessionTest, BackwardWritingPrependsAndToggleFlips) {
  const auto id = Create(10, UiDesign::kDigitKeys, Direction::kBackward);
  auto s = store_.Apply(id, KeyEvent::Digit(1));
  EXPECT_EQ(s.text, " w1");
  s = store_.Apply(id, KeyEvent::Digit(2));
  EXPECT_EQ(s.text, " w2 w1");
  s = store_.Apply(id, KeyEvent::Char("x"));
  EXPECT_EQ(s.text, "x w2 w1");
  s = store_.Apply(id, KeyEvent::Toggle());
  EXPECT_EQ(s.direction, Direction::kForward);
  EXPECT_EQ(s.text, "x w2 w1");
  EXPECT_EQ(s.pending, "");
  s = store_.Apply(id, KeyEvent::Digit(3));
  EXPECT_EQ(s.text, "x w2 w1 w3");
  EXPECT_EQ(store_.Suggestions(id).direction, Direction::kForward);
}

TEST_F(SessionTest, ReplayingTheLogRebuildsTheState) {
  const auto id = Create(10, UiDesign::kLegacyArrowTab);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    switch (rng() % 4) {
      case 0: store_.Apply(id, KeyEvent::Digit(rng() % 10)); break;
      case 1: store_.Apply(id, KeyEvent::Char(std::string(1, 'a' + rng() % 26))); break;
      case 2: store_.Apply(id, KeyEvent::Char(" ")); break;
      default:
        store_.Apply(id, rng() % 3 ? KeyEvent::Backspace() : KeyEvent::Toggle());
    }
  }
  const auto replay = store_.Create(store_.Config(id));
  for (const auto& e : store_.EventLog(id)) store_.Apply(replay, e);
  auto original = store_.Snapshot(id);
  auto rebuilt = store_.Snapshot(replay);
  rebuilt.session_id = original.session_id;
  EXPECT_EQ(rebuilt, original);
}

TEST(SessionModels, UnigramAndBigramSuggestions) {
  const std::vector<std::string> corpus = {"a b a b"};
  auto vocab = std::make_shared<Vocabulary>(
      Vocabulary::Train(corpus, 0, Scheme::kWhitespace));
  const TokenSequence seq = vocab->Encode("a b a b");
  const TokenSequence rev(seq.rbegin(), seq.rend());
  NgramOptions opt;
  opt.order = 2;
  auto fwd = std::make_shared<NgramModel>(
      NgramModel::Train(std::vector<TokenSequence>{seq}, vocab->size(), opt));
  auto bwd = std::make_shared<NgramModel>(
      NgramModel::Train(std::vector<TokenSequence>{rev}, vocab->size(), opt));
  SessionStore store;
  store.RegisterModel("bigram", {std::make_shared<BidirectionalPredictor>(
                                     BidirectionalPredictor::Dual(fwd, bwd)),
                                 vocab});

  const auto fresh = store.Create({UiDesign::kDigitKeys, Direction::kForward, 3, "bigram"});
  const auto unigram = oracle::UnigramOrder({seq}, vocab->size());
  const auto p = store.Suggestions(fresh);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(p.candidates[i].id, unigram[i]);

  store.Apply(fresh, KeyEvent::Char("a"));
  EXPECT_EQ(store.SuggestionSurfaces(fresh).front(), " b");

  const auto back = store.Create({UiDesign::kDigitKeys, Direction::kBackward, 3, "bigram"});
  store.Apply(back, KeyEvent::Digit(0));
  const auto q = store.Suggestions(back);
  EXPECT_EQ(q.direction, Direction::kBackward);
}

// Server accounting agrees with the batch engine: after the seed token is
// typed, a client that takes every hit with a digit key and types every
// miss lands on the same keystroke counts as the forward leg.
TEST(SessionParity, EventStreamMatchesEngineLedger) {
  std::vector<std::string> words;
  for (int i = 0; i < 30; ++i) words.push_back("w" + std::string(1 + i % 5, 'a' + i % 26));
  const auto vocab = std::make_shared<Vocabulary>(testing::MakeVocab(words));
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t t = 2 + rng() % 20;
    const std::size_t k = 1 + rng() % 10;
    const auto design = rng() % 2 ? UiDesign::kDigitKeys : UiDesign::kLegacyArrowTab;
    TokenSequence tokens;
    for (std::size_t i = 0; i < t; ++i) tokens.push_back(257 + rng() % words.size());
    std::map<std::size_t, Prediction> script;
    std::vector<std::size_t> ranks;
    for (std::size_t step = 1; step < t; ++step) {
      const std::size_t rank = rng() % (k + 2) > k ? 0 : 1 + rng() % k;
      ranks.push_back(rank);
      script[step] = RankedPrediction(tokens[step], rank, k, vocab->size());
    }
    const ScriptedPredictor engine_script(script);
    EngineOptions opt;
    opt.k = k;
    const auto ledger = EvaluateLeg(engine_script, *vocab, tokens,
                                    Direction::kForward, design, opt);

    SessionStore store;
    auto server_script = std::make_shared<ScriptedPredictor>(script);
    store.RegisterModel("m", {server_script, vocab});
    const auto id = store.Create({design, Direction::kForward, k, "m"});
    for (char c : std::string(vocab->Surface(tokens[0]).surface)) {
      store.Apply(id, KeyEvent::Char(std::string(1, c)));
    }
    const auto seeded = store.Snapshot(id);
    for (std::size_t step = 1; step < t; ++step) {
      store.Suggestions(id);
      if (ranks[step - 1]) {
        store.Apply(id, KeyEvent::Digit(static_cast<unsigned>(ranks[step - 1] - 1)));
      } else {
        for (char c : std::string(vocab->Surface(tokens[step]).surface)) {
          store.Apply(id, KeyEvent::Char(std::string(1, c)));
        }
      }
    }
    const auto done = store.Snapshot(id);
    EXPECT_EQ(done.actual - seeded.actual, ledger.keys_auto);
    EXPECT_EQ(done.manual_equivalent - seeded.manual_equivalent, ledger.keys_manual);
    EXPECT_EQ(server_script->calls(), t - 1);
  }
}

}  // namespace
}  // namespace keysave
