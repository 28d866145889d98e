// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_NGRAM_HPP_
#define KEYSAVE_NGRAM_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "keysave/corpus.hpp"
#include "keysave/predictor.hpp"
#include "keysave/tokenizer.hpp"

namespace keysave {

// A model that ranks the token following `context`, where context is in the
// order the model was trained on (most recent token last).
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;
  virtual Prediction PredictNext(std::span<const TokenId> context,
                                 std::size_t k) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

struct NgramOptions {
  int order = 4;
  double discount = 0.4;
  // Recorded in the model file; informs how a loaded model is wired into a
  // BidirectionalPredictor.
  DirectionMode trained_on = DirectionMode::kForwardOnly;
};

// Count-based n-gram model scored with stupid backoff.
//
// S(w | ctx) = c(ctx, w) / c(ctx) when the longest usable suffix ctx has seen
// w, else discount * S(w | ctx minus its oldest token), down to unigrams.
// Scoring starts at the longest suffix (length < order) that was observed as
// a context. Tokens never seen in training pad the list with score 0.
class NgramModel final : public SequenceModel {
 public:
  struct Successor {
    TokenId id;
    std::uint64_t count;
  };

  static NgramModel Train(std::span<const TokenSequence> sequences,
                          std::size_t vocab_size,
                          const NgramOptions& options = {});

  static NgramModel Load(std::istream& in);
  static NgramModel LoadFile(const std::string& path);
  void Save(std::ostream& out) const;
  void SaveFile(const std::string& path) const;

  // Throws UsageError when k is 0 or exceeds the vocabulary size.
  Prediction PredictNext(std::span<const TokenId> context,
                         std::size_t k) const override;

  std::size_t vocab_size() const override { return vocab_size_; }
  int order() const { return options_.order; }
  double discount() const { return options_.discount; }
  DirectionMode trained_on() const { return options_.trained_on; }

  // Exact occurrence count of `next` following `context`; an empty context
  // gives unigram frequency.
  std::uint64_t Count(std::span<const TokenId> context, TokenId next) const;
  // Total count of successors observed after `context`.
  std::uint64_t ContextTotal(std::span<const TokenId> context) const;
  std::size_t num_contexts() const { return table_.size(); }

  friend bool operator==(const NgramModel& a, const NgramModel& b);

 private:
  struct Entry {
    std::uint64_t total = 0;
    std::vector<Successor> by_count;  // count desc, id asc
    std::vector<Successor> by_id;     // id asc
  };
  struct KeyHash {
    std::size_t operator()(const std::vector<TokenId>& key) const;
  };
  using Table = std::unordered_map<std::vector<TokenId>, Entry, KeyHash>;

  NgramModel(std::size_t vocab_size, NgramOptions options, Table table);
  const Entry* Find(std::span<const TokenId> context) const;
  static void Finalize(Entry& entry);

  std::size_t vocab_size_;
  NgramOptions options_;
  Table table_;
};

}  // namespace keysave

#endif  // KEYSAVE_NGRAM_HPP_
