// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_TOKENIZER_HPP_
#define KEYSAVE_TOKENIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace keysave {

using TokenId = std::uint32_t;
using TokenSequence = std::vector<TokenId>;

enum class Scheme { kBpe, kWhitespace };

std::string_view SchemeName(Scheme scheme);
Scheme ParseScheme(std::string_view name);

struct TokenSurface {
  std::string_view surface;
  // Characters (UTF-8 code points) left after stripping leading and trailing
  // whitespace. This is the manual typing cost of the token.
  std::size_t stripped_length = 0;
};

// Splits text into pre-tokens. A single space directly before a word or
// punctuation mark is attached to it; other whitespace forms its own pieces.
// Concatenating the pieces reproduces the text exactly.
std::vector<std::string_view> PreTokenize(std::string_view text);

// Number of UTF-8 code points in `text` once ASCII whitespace is stripped
// from both ends.
std::size_t StrippedLength(std::string_view text);

// Immutable subword inventory.
//
// Layout: id 0 is the reserved unknown token, ids 1..256 are single-byte
// fallback tokens (byte b has id b + 1), and learned entries follow. Because
// every byte has a token, encode never loses characters and
// Decode(Encode(text)) == text for any input.
class Vocabulary {
 public:
  static constexpr TokenId kUnknownId = 0;
  static constexpr std::size_t kBaseSize = 257;
  static constexpr std::size_t kMinBpeSize = 260;
  static constexpr std::size_t kDefaultBpeSize = 8192;

  // Throws UsageError on an empty corpus or a BPE size below kMinBpeSize.
  // The whitespace scheme ignores `vocab_size`.
  static Vocabulary Train(std::span<const std::string> corpus_texts,
                          std::size_t vocab_size, Scheme scheme);

  // Surfaces must be unique, non-empty and include the base layout.
  static Vocabulary FromSurfaces(Scheme scheme,
                                 std::vector<std::string> surfaces);

  static Vocabulary Load(std::istream& in);
  static Vocabulary LoadFile(const std::string& path);
  void Save(std::ostream& out) const;
  void SaveFile(const std::string& path) const;

  Scheme scheme() const { return scheme_; }
  std::size_t size() const { return surfaces_.size(); }

  TokenSequence Encode(std::string_view text) const;
  std::string Decode(std::span<const TokenId> tokens) const;
  TokenSurface Surface(TokenId id) const;

  bool Contains(std::string_view surface) const;
  TokenId IdOf(std::string_view surface) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.scheme_ == b.scheme_ && a.surfaces_ == b.surfaces_;
  }

 private:
  Vocabulary(Scheme scheme, std::vector<std::string> surfaces);
  void CheckId(TokenId id) const;

  Scheme scheme_;
  std::vector<std::string> surfaces_;
  std::vector<std::size_t> stripped_;
  std::unordered_map<std::string, TokenId> index_;
  std::size_t max_surface_bytes_ = 1;
};

// Escaping used by the vocabulary file: \t, \n, \\, \r and \xHH for the
// remaining control bytes.
std::string EscapeSurface(std::string_view surface);
std::string UnescapeSurface(std::string_view escaped);

}  // namespace keysave

#endif  // KEYSAVE_TOKENIZER_HPP_
