// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/tokenizer.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "keysave/error.hpp"
#include "keysave/synth.hpp"

namespace keysave {
namespace {

std::vector<std::string> Surfaces(const Vocabulary& v, const TokenSequence& ids) {
  std::vector<std::string> out;
  for (auto id : ids) out.emplace_back(v.Surface(id).surface);
  return out;
}

std::vector<std::string> SyntheticTexts(std::size_t bytes) {
  SynthOptions opt;
  opt.target_bytes = bytes;
  std::vector<std::string> texts;
  for (auto& r : GenerateSyntheticClaims(opt)) texts.push_back(r.text);
  return texts;
}

TEST(PreTokenize, AttachesLeadingSpace) {
  const auto pieces = PreTokenize("A cat sat.");
  const std::vector<std::string_view> want = {"A", " cat", " sat", "."};
  EXPECT_EQ(pieces, want);
}

TEST(PreTokenize, PiecesConcatenateToInput) {
  for (std::string text : {"", "  two  spaces", "tab\there", "end ", "a,b;c",
                           "caf\xC3\xA9 na\xC3\xAFve", "\n\nnew line"}) {
    std::string joined;
    for (auto p : PreTokenize(text)) joined += p;
    EXPECT_EQ(joined, text);
  }
}

TEST(Tokenizer, WhitespaceSchemeWordBoundaries) {
  const std::vector<std::string> corpus = {"a b a b"};
  const auto v = Vocabulary::Train(corpus, 0, Scheme::kWhitespace);
  EXPECT_TRUE(v.Contains("a"));
  EXPECT_TRUE(v.Contains(" b"));
  EXPECT_TRUE(v.Contains(" a"));
  EXPECT_FALSE(v.Contains("b "));
  EXPECT_EQ(Surfaces(v, v.Encode("a b a b")),
            (std::vector<std::string>{"a", " b", " a", " b"}));
}

TEST(Tokenizer, EncodeSentenceUnderWhitespaceScheme) {
  const std::vector<std::string> corpus = {"A cat sat.", "The dog ran."};
  const auto v = Vocabulary::Train(corpus, 0, Scheme::kWhitespace);
  EXPECT_EQ(Surfaces(v, v.Encode("A cat sat.")),
            (std::vector<std::string>{"A", " cat", " sat", "."}));
}

TEST(Tokenizer, EmptyTextRoundTrip) {
  const auto v = testing::MakeVocab({" cat"});
  EXPECT_TRUE(v.Encode("").empty());
  EXPECT_EQ(v.Decode({}), "");
}

TEST(Tokenizer, DecodeKeepsLeadingSpace) {
  const auto v = testing::MakeVocab({" cat"});
  const TokenSequence ids = {v.IdOf(" cat")};
  EXPECT_EQ(v.Decode(ids), " cat");
}

TEST(Tokenizer, StrippedLengths) {
  const auto v = testing::MakeVocab({" cat", "  ", "caf\xC3\xA9", " \xE2\x86\x92 "});
  EXPECT_EQ(v.Surface(v.IdOf(" cat")).stripped_length, 3u);
  EXPECT_EQ(v.Surface(v.IdOf(".")).stripped_length, 1u);
  EXPECT_EQ(v.Surface(v.IdOf("  ")).stripped_length, 0u);
  EXPECT_EQ(v.Surface(v.IdOf("caf\xC3\xA9")).stripped_length, 4u);
  EXPECT_EQ(v.Surface(v.IdOf(" \xE2\x86\x92 ")).stripped_length, 1u);
  EXPECT_EQ(StrippedLength("\t x y \n"), 3u);
}

TEST(Tokenizer, TrainingIsDeterministic) {
  const auto texts = SyntheticTexts(40000);
  for (auto scheme : {Scheme::kBpe, Scheme::kWhitespace}) {
    const auto a = Vocabulary::Train(texts, 600, scheme);
    const auto b = Vocabulary::Train(texts, 600, scheme);
    std::ostringstream sa, sb;
    a.Save(sa);
    b.Save(sb);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_TRUE(a == b);
  }
}

TEST(Tokenizer, BpeRespectsSizeAndMergesFrequentPairs) {
  const auto texts = SyntheticTexts(40000);
  const auto v = Vocabulary::Train(texts, 500, Scheme::kBpe);
  EXPECT_LE(v.size(), 500u);
  EXPECT_GT(v.size(), Vocabulary::kBaseSize);
  // Frequent words end up shorter than their byte count.
  const auto ids = v.Encode(" wherein");
  EXPECT_LT(ids.size(), 8u);
}

TEST(Tokenizer, RoundTripOnCorpusAndUnseenText) {
  const auto texts = SyntheticTexts(40000);
  const auto v = Vocabulary::Train(texts, 800, Scheme::kBpe);
  for (const auto& t : texts) EXPECT_EQ(v.Decode(v.Encode(t)), t);
  for (std::string t : {"Z\xC3\xBCrich \xE6\x97\xA5\xE6\x9C\xAC  \t\n", "\x01\xFF\x80",
                        "unseen qwxz words!!"}) {
    EXPECT_EQ(v.Decode(v.Encode(t)), t);
  }
}

TEST(Tokenizer, RandomBytesRoundTrip) {
  const auto v = Vocabulary::Train(SyntheticTexts(20000), 400, Scheme::kBpe);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::string s(rng() % 40, '\0');
    for (auto& c : s) c = static_cast<char>(rng() & 0xFF);
    EXPECT_EQ(v.Decode(v.Encode(s)), s);
  }
}

TEST(Tokenizer, FileRoundTripWithAwkwardSurfaces) {
  const auto v = testing::MakeVocab({" tab\there", "line\nbreak", "back\\slash",
                                     " \xC3\xA9t\xC3\xA9", "\r\x7F"});
  std::stringstream buf;
  v.Save(buf);
  const auto loaded = Vocabulary::Load(buf);
  EXPECT_TRUE(loaded == v);

  testing::TempDir dir;
  v.SaveFile(dir.file("vocab.txt"));
  EXPECT_TRUE(Vocabulary::LoadFile(dir.file("vocab.txt")) == v);
}

TEST(Tokenizer, EscapeRoundTrip) {
  for (const std::string s : {std::string("plain"), std::string("\t\n\r\\"),
                              std::string("\0x", 2), std::string("\x01\x7F")}) {
    EXPECT_EQ(UnescapeSurface(EscapeSurface(s)), s);
  }
  EXPECT_THROW(UnescapeSurface("bad\\"), DataError);
  EXPECT_THROW(UnescapeSurface("\\x4"), DataError);
  EXPECT_THROW(UnescapeSurface("\\q"), DataError);
}

TEST(Tokenizer, Errors) {
  EXPECT_THROW(Vocabulary::Train(std::vector<std::string>{}, 500, Scheme::kBpe),
               UsageError);
  EXPECT_THROW(Vocabulary::Train(std::vector<std::string>{"", ""}, 500,
                                 Scheme::kWhitespace),
               UsageError);
  EXPECT_THROW(Vocabulary::Train(std::vector<std::string>{"x"}, 100, Scheme::kBpe),
               UsageError);
  const auto v = testing::MakeVocab({});
  EXPECT_THROW(v.Surface(static_cast<TokenId>(v.size())), UsageError);
  EXPECT_THROW(ParseScheme("sentencepiece"), UsageError);
  EXPECT_THROW(Vocabulary::FromSurfaces(Scheme::kBpe, {"a", "b"}), DataError);

  std::istringstream garbage("not a vocabulary\n");
  EXPECT_THROW(Vocabulary::Load(garbage), DataError);
  EXPECT_THROW(Vocabulary::LoadFile("/nonexistent/vocab.txt"), DataError);
}

}  // namespace
}  // namespace keysave
