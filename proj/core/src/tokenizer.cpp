// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/tokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "keysave/error.hpp"

namespace keysave {
namespace {

constexpr std::string_view kUnknownSurface = "<unk>";

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Letters, digits and every non-ASCII byte (so UTF-8 words stay whole).
bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::vector<std::string> BaseSurfaces() {
  std::vector<std::string> surfaces;
  surfaces.reserve(Vocabulary::kBaseSize);
  surfaces.emplace_back(kUnknownSurface);
  for (int b = 0; b < 256; ++b) {
    surfaces.emplace_back(1, static_cast<char>(b));
  }
  return surfaces;
}

std::map<std::string, std::int64_t> CountPieces(
    std::span<const std::string> texts) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& text : texts) {
    for (auto piece : PreTokenize(text)) {
      ++counts[std::string(piece)];
    }
  }
  return counts;
}

// Incremental byte-level BPE trainer. Pair ranking: highest frequency first,
// ties broken by ascending (left id, right id).
class BpeTrainer {
 public:
  using Pair = std::pair<TokenId, TokenId>;

  BpeTrainer(const std::map<std::string, std::int64_t>& pieces,
             std::vector<std::string>& surfaces)
      : surfaces_(surfaces) {
    for (const auto& [piece, freq] : pieces) {
      Word word{{}, freq};
      for (unsigned char c : piece) word.symbols.push_back(TokenId{c} + 1);
      words_.push_back(std::move(word));
    }
    for (const auto& s : surfaces_) {
      by_surface_.emplace(s, static_cast<TokenId>(by_surface_.size()));
    }
    for (std::size_t w = 0; w < words_.size(); ++w) AddPairs(w);
  }

  void Run(std::size_t vocab_size) {
    while (surfaces_.size() < vocab_size && !ranking_.empty()) {
      auto [neg_count, left, right] = *ranking_.begin();
      const Pair pair{left, right};
      std::string merged = surfaces_[left] + surfaces_[right];
      TokenId target;
      if (auto it = by_surface_.find(merged); it != by_surface_.end()) {
        target = it->second;
      } else {
        target = static_cast<TokenId>(surfaces_.size());
        by_surface_.emplace(merged, target);
        surfaces_.push_back(std::move(merged));
      }
      const std::set<std::size_t> affected = where_[pair];
      for (std::size_t w : affected) {
        RemovePairs(w);
        Merge(words_[w].symbols, pair, target);
        AddPairs(w);
      }
    }
  }

 private:
  struct Word {
    std::vector<TokenId> symbols;
    std::int64_t freq;
  };

  void Adjust(const Pair& pair, std::int64_t delta, std::size_t word) {
    auto& count = counts_[pair];
    if (count > 0) ranking_.erase({-count, pair.first, pair.second});
    count += delta;
    if (count > 0) {
      ranking_.insert({-count, pair.first, pair.second});
    } else {
      counts_.erase(pair);
    }
    if (delta > 0) {
      where_[pair].insert(word);
    }
  }

  void AddPairs(std::size_t w) {
    const auto& syms = words_[w].symbols;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      Adjust({syms[i], syms[i + 1]}, words_[w].freq, w);
    }
  }

  void RemovePairs(std::size_t w) {
    const auto& syms = words_[w].symbols;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      Pair pair{syms[i], syms[i + 1]};
      Adjust(pair, -words_[w].freq, w);
      if (auto it = where_.find(pair); it != where_.end()) {
        it->second.erase(w);
        if (it->second.empty()) where_.erase(it);
      }
    }
  }

  static void Merge(std::vector<TokenId>& syms, const Pair& pair,
                    TokenId target) {
    std::vector<TokenId> out;
    out.reserve(syms.size());
    for (std::size_t i = 0; i < syms.size(); ++i) {
      if (i + 1 < syms.size() && syms[i] == pair.first &&
          syms[i + 1] == pair.second) {
        out.push_back(target);
        ++i;
      } else {
        out.push_back(syms[i]);
      }
    }
    syms = std::move(out);
  }

  std::vector<std::string>& surfaces_;
  std::map<std::string, TokenId> by_surface_;
  std::vector<Word> words_;
  std::map<Pair, std::int64_t> counts_;
  std::map<Pair, std::set<std::size_t>> where_;
  std::set<std::tuple<std::int64_t, TokenId, TokenId>> ranking_;
};

}  // namespace

std::string_view SchemeName(Scheme scheme) {
  return scheme == Scheme::kBpe ? "bpe" : "whitespace";
}

Scheme ParseScheme(std::string_view name) {
  if (name == "bpe") return Scheme::kBpe;
  if (name == "whitespace") return Scheme::kWhitespace;
  throw UsageError("unknown tokenizer scheme '" + std::string(name) + "'");
}

std::vector<std::string_view> PreTokenize(std::string_view text) {
  std::vector<std::string_view> pieces;
  const std::size_t n = text.size();
  auto at = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  std::size_t i = 0;
  while (i < n) {
    const std::size_t start = i;
    if (at(i) == ' ' && i + 1 < n && !IsSpace(at(i + 1))) ++i;
    const unsigned char c = at(i);
    if (IsWordByte(c)) {
      while (i < n && IsWordByte(at(i))) ++i;
    } else if (!IsSpace(c)) {
      ++i;
    } else {
      while (i < n && IsSpace(at(i))) ++i;
      // Leave a final single space for the following word.
      if (i < n && i - start > 1 && at(i - 1) == ' ') --i;
    }
    pieces.push_back(text.substr(start, i - start));
  }
  return pieces;
}

std::size_t StrippedLength(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && IsSpace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin && IsSpace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  std::size_t chars = 0;
  for (std::size_t i = begin; i < end; ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++chars;
  }
  return chars;
}

Vocabulary::Vocabulary(Scheme scheme, std::vector<std::string> surfaces)
    : scheme_(scheme), surfaces_(std::move(surfaces)) {
  if (surfaces_.size() < kBaseSize) {
    throw DataError("vocabulary has " + std::to_string(surfaces_.size()) +
                    " entries, fewer than the byte-fallback base");
  }
  const auto base = BaseSurfaces();
  if (!std::equal(base.begin(), base.end(), surfaces_.begin())) {
    throw DataError("vocabulary does not start with the reserved base entries");
  }
  stripped_.reserve(surfaces_.size());
  index_.reserve(surfaces_.size());
  for (std::size_t id = 0; id < surfaces_.size(); ++id) {
    const auto& s = surfaces_[id];
    if (s.empty()) {
      throw DataError("vocabulary entry " + std::to_string(id) + " is empty");
    }
    if (!index_.emplace(s, static_cast<TokenId>(id)).second) {
      throw DataError("duplicate vocabulary surface at id " +
                      std::to_string(id));
    }
    stripped_.push_back(StrippedLength(s));
    max_surface_bytes_ = std::max(max_surface_bytes_, s.size());
  }
}

Vocabulary Vocabulary::Train(std::span<const std::string> corpus_texts,
                             std::size_t vocab_size, Scheme scheme) {
  const bool has_text =
      std::any_of(corpus_texts.begin(), corpus_texts.end(),
                  [](const std::string& t) { return !t.empty(); });
  if (!has_text) throw UsageError("cannot train a tokenizer on an empty corpus");
  if (scheme == Scheme::kBpe && vocab_size < kMinBpeSize) {
    throw UsageError("bpe vocabulary size must be at least " +
                     std::to_string(kMinBpeSize));
  }
  const auto pieces = CountPieces(corpus_texts);
  auto surfaces = BaseSurfaces();
  if (scheme == Scheme::kBpe) {
    BpeTrainer trainer(pieces, surfaces);
    trainer.Run(vocab_size);
  } else {
    std::vector<std::pair<std::string, std::int64_t>> ranked;
    for (const auto& [piece, freq] : pieces) {
      if (piece.size() > 1) ranked.emplace_back(piece, freq);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) {
                       return a.second > b.second;
                     });
    for (auto& entry : ranked) surfaces.push_back(std::move(entry.first));
  }
  return Vocabulary(scheme, std::move(surfaces));
}

Vocabulary Vocabulary::FromSurfaces(Scheme scheme,
                                    std::vector<std::string> surfaces) {
  return Vocabulary(scheme, std::move(surfaces));
}

TokenSequence Vocabulary::Encode(std::string_view text) const {
  TokenSequence ids;
  for (auto piece : PreTokenize(text)) {
    std::size_t pos = 0;
    while (pos < piece.size()) {
      std::size_t len = std::min(max_surface_bytes_, piece.size() - pos);
      for (; len > 1; --len) {
        if (index_.count(std::string(piece.substr(pos, len)))) break;
      }
      ids.push_back(IdOf(piece.substr(pos, len)));
      pos += len;
    }
  }
  return ids;
}

std::string Vocabulary::Decode(std::span<const TokenId> tokens) const {
  std::string text;
  for (TokenId id : tokens) {
    CheckId(id);
    text += surfaces_[id];
  }
  return text;
}

TokenSurface Vocabulary::Surface(TokenId id) const {
  CheckId(id);
  return {surfaces_[id], stripped_[id]};
}

bool Vocabulary::Contains(std::string_view surface) const {
  return index_.count(std::string(surface)) > 0;
}

TokenId Vocabulary::IdOf(std::string_view surface) const {
  auto it = index_.find(std::string(surface));
  return it == index_.end() ? kUnknownId : it->second;
}

void Vocabulary::CheckId(TokenId id) const {
  if (id >= surfaces_.size()) {
    throw UsageError("token id " + std::to_string(id) +
                     " out of range for vocabulary of size " +
                     std::to_string(surfaces_.size()));
  }
}

void Vocabulary::Save(std::ostream& out) const {
  out << "scheme=" << SchemeName(scheme_) << " size=" << surfaces_.size()
      << '\n';
  for (std::size_t id = 0; id < surfaces_.size(); ++id) {
    out << id << '\t' << EscapeSurface(surfaces_[id]) << '\n';
  }
}

void Vocabulary::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  Save(out);
}

Vocabulary Vocabulary::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("vocabulary file is empty");
  std::string scheme_field, size_field;
  std::istringstream header(line);
  header >> scheme_field >> size_field;
  if (scheme_field.rfind("scheme=", 0) != 0 ||
      size_field.rfind("size=", 0) != 0) {
    throw DataError("bad vocabulary header: '" + line + "'");
  }
  Scheme scheme;
  std::size_t size = 0;
  try {
    scheme = ParseScheme(scheme_field.substr(7));
    size = std::stoul(size_field.substr(5));
  } catch (const std::exception&) {
    throw DataError("bad vocabulary header: '" + line + "'");
  }
  std::vector<std::string> surfaces;
  surfaces.reserve(size);
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("vocabulary line " + std::to_string(surfaces.size() + 2) +
                      " lacks a tab");
    }
    if (line.substr(0, tab) != std::to_string(surfaces.size())) {
      throw DataError("vocabulary ids must be dense and ordered; expected " +
                      std::to_string(surfaces.size()));
    }
    surfaces.push_back(UnescapeSurface(std::string_view(line).substr(tab + 1)));
  }
  if (surfaces.size() != size) {
    throw DataError("vocabulary header declares " + std::to_string(size) +
                    " entries, found " + std::to_string(surfaces.size()));
  }
  return Vocabulary(scheme, std::move(surfaces));
}

Vocabulary Vocabulary::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary '" + path + "'");
  return Load(in);
}

std::string EscapeSurface(std::string_view surface) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : surface) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          out += "\\x";
          out += kHex[c >> 4];
          out += kHex[c & 0xF];
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string UnescapeSurface(std::string_view escaped) {
  auto hex = [&](char h) -> int {
    if (h >= '0' && h <= '9') return h - '0';
    if (h >= 'a' && h <= 'f') return h - 'a' + 10;
    if (h >= 'A' && h <= 'F') return h - 'A' + 10;
    throw DataError("bad hex digit in escaped surface");
  };
  std::string out;
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    if (escaped[i] != '\\') {
      out += escaped[i];
      continue;
    }
    if (++i >= escaped.size()) throw DataError("dangling backslash in surface");
    switch (escaped[i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      case 'x':
        if (i + 2 >= escaped.size()) {
          throw DataError("truncated \\x escape");
        }
        out += static_cast<char>(hex(escaped[i + 1]) * 16 + hex(escaped[i + 2]));
        i += 2;
        break;
      default:
        throw DataError(std::string("unknown escape \\") + escaped[i]);
    }
  }
  return out;
}

}  // namespace keysave
