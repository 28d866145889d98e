// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_CORPUS_HPP_
#define KEYSAVE_CORPUS_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "keysave/tokenizer.hpp"

namespace keysave {

struct ClaimRecord {
  std::string patent_id;
  int claim_no = 0;
  std::optional<int> parent_claim_no;
  std::string text;
  std::optional<std::string> cpc;
  std::optional<int> year;

  friend bool operator==(const ClaimRecord&, const ClaimRecord&) = default;
};

enum class DirectionMode { kForwardOnly, kBackwardOnly, kMixed };

DirectionMode ParseDirectionMode(std::string_view name);
std::string_view DirectionModeName(DirectionMode mode);

// Validated, immutable set of claim records kept in ingest order.
class Corpus {
 public:
  using Key = std::pair<std::string, int>;

  // Throws DataError on duplicate (patent_id, claim_no), a non-positive claim
  // number, or a parent that is absent or not smaller than the claim.
  static Corpus Ingest(std::vector<ClaimRecord> records);

  const std::vector<ClaimRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  const ClaimRecord& Find(const std::string& patent_id, int claim_no) const;

  // Ancestor chain root-first, joined by single spaces. Independent claims
  // come back unchanged.
  std::string ExpandClaim(const std::string& patent_id, int claim_no) const;

 private:
  Corpus() = default;

  std::vector<ClaimRecord> records_;
  std::map<Key, std::size_t> index_;
};

// JSON Lines claim file. Line numbers are reported in DataError messages.
std::vector<ClaimRecord> ReadClaims(std::istream& in);
std::vector<ClaimRecord> ReadClaimsFile(const std::string& path);
void WriteClaims(std::ostream& out, const std::vector<ClaimRecord>& records);
void WriteClaimsFile(const std::string& path,
                     const std::vector<ClaimRecord>& records);

// Expanded texts of every record, in corpus order.
std::vector<std::string> ExpandedTexts(const Corpus& corpus);

struct SequenceOptions {
  // When set, prepended to every reversed sequence.
  std::optional<TokenId> backward_marker;
};

// forward_only: encode(expanded) per claim. backward_only: those id lists
// reversed element-wise. mixed: all forward sequences, then all backward.
std::vector<TokenSequence> BuildSequences(const Corpus& corpus,
                                          const Vocabulary& vocab,
                                          DirectionMode mode,
                                          const SequenceOptions& options = {});

struct CorpusSplit {
  Corpus train;
  Corpus eval;
};

// Seeded random split; eval receives round(fraction * N) records clamped to
// [1, N-1]. Both halves keep ingest order.
CorpusSplit Split(const Corpus& corpus, double eval_fraction,
                  std::uint64_t seed);

// Records with year <= cutoff train, later years evaluate. Records without a
// year are rejected.
CorpusSplit SplitByYear(const Corpus& corpus, int cutoff_year);

// Keeps only records whose cpc tag starts with `prefix`.
Corpus FilterByCpc(const Corpus& corpus, const std::string& prefix);

}  // namespace keysave

#endif  // KEYSAVE_CORPUS_HPP_
