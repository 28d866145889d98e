// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "json.hpp"
#include "keysave/error.hpp"
#include "random.hpp"

namespace keysave {
namespace {

std::string KeyName(const std::string& patent_id, int claim_no) {
  return patent_id + " claim " + std::to_string(claim_no);
}

// A kept dependent claim whose parent is dropped is materialized: its text
// becomes the expanded text and the parent link is removed, so expansion
// results are identical inside and outside the subset.
Corpus Subset(const Corpus& corpus, const std::vector<bool>& keep) {
  std::set<std::pair<std::string, int>> kept;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus.records()[i];
    if (keep[i]) kept.emplace(r.patent_id, r.claim_no);
  }
  std::vector<ClaimRecord> records;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!keep[i]) continue;
    ClaimRecord r = corpus.records()[i];
    if (r.parent_claim_no && !kept.count({r.patent_id, *r.parent_claim_no})) {
      r.text = corpus.ExpandClaim(r.patent_id, r.claim_no);
      r.parent_claim_no.reset();
    }
    records.push_back(std::move(r));
  }
  return Corpus::Ingest(std::move(records));
}

}  // namespace

DirectionMode ParseDirectionMode(std::string_view name) {
  if (name == "forward") return DirectionMode::kForwardOnly;
  if (name == "backward") return DirectionMode::kBackwardOnly;
  if (name == "mixed") return DirectionMode::kMixed;
  throw UsageError("unknown direction mode '" + std::string(name) + "'");
}

std::string_view DirectionModeName(DirectionMode mode) {
  switch (mode) {
    case DirectionMode::kForwardOnly: return "forward";
    case DirectionMode::kBackwardOnly: return "backward";
    case DirectionMode::kMixed: return "mixed";
  }
  return "?";
}

Corpus Corpus::Ingest(std::vector<ClaimRecord> records) {
  Corpus corpus;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.claim_no <= 0) {
      throw DataError("claim number must be positive: " +
                      KeyName(r.patent_id, r.claim_no));
    }
    if (!corpus.index_.emplace(Key{r.patent_id, r.claim_no}, i).second) {
      throw DataError("duplicate claim " + KeyName(r.patent_id, r.claim_no));
    }
  }
  for (const auto& r : records) {
    if (!r.parent_claim_no) continue;
    const int parent = *r.parent_claim_no;
    if (parent >= r.claim_no ||
        !corpus.index_.count(Key{r.patent_id, parent})) {
      throw DataError(KeyName(r.patent_id, r.claim_no) +
                      " refers to missing or later parent claim " +
                      std::to_string(parent));
    }
  }
  corpus.records_ = std::move(records);
  return corpus;
}

const ClaimRecord& Corpus::Find(const std::string& patent_id,
                                int claim_no) const {
  auto it = index_.find(Key{patent_id, claim_no});
  if (it == index_.end()) {
    throw UsageError("no such claim: " + KeyName(patent_id, claim_no));
  }
  return records_[it->second];
}

std::string Corpus::ExpandClaim(const std::string& patent_id,
                                int claim_no) const {
  std::vector<const ClaimRecord*> chain;
  std::set<int> seen;
  const ClaimRecord* current = &Find(patent_id, claim_no);
  while (true) {
    if (!seen.insert(current->claim_no).second) {
      throw DataError("cycle in parent chain of " +
                      KeyName(patent_id, claim_no));
    }
    chain.push_back(current);
    if (!current->parent_claim_no) break;
    current = &Find(patent_id, *current->parent_claim_no);
  }
  std::string text;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if (!text.empty()) text += ' ';
    text += (*it)->text;
  }
  return text;
}

std::vector<ClaimRecord> ReadClaims(std::istream& in) {
  std::vector<ClaimRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "claim file line " + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + ": " + e.what());
    }
    try {
      ClaimRecord r;
      r.patent_id = j.at("patent_id").get<std::string>();
      r.claim_no = j.at("claim_no").get<int>();
      if (j.contains("parent_claim_no") && !j["parent_claim_no"].is_null()) {
        r.parent_claim_no = j["parent_claim_no"].get<int>();
      }
      r.text = j.at("text").get<std::string>();
      if (j.contains("cpc") && !j["cpc"].is_null()) {
        r.cpc = j["cpc"].get<std::string>();
      }
      if (j.contains("year") && !j["year"].is_null()) {
        r.year = j["year"].get<int>();
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return records;
}

std::vector<ClaimRecord> ReadClaimsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open claim file '" + path + "'");
  return ReadClaims(in);
}

void WriteClaims(std::ostream& out, const std::vector<ClaimRecord>& records) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["patent_id"] = r.patent_id;
    j["claim_no"] = r.claim_no;
    j["parent_claim_no"] =
        r.parent_claim_no ? nlohmann::ordered_json(*r.parent_claim_no)
                          : nlohmann::ordered_json(nullptr);
    j["text"] = r.text;
    if (r.cpc) j["cpc"] = *r.cpc;
    if (r.year) j["year"] = *r.year;
    out << j.dump() << '\n';
  }
}

void WriteClaimsFile(const std::string& path,
                     const std::vector<ClaimRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  WriteClaims(out, records);
}

std::vector<std::string> ExpandedTexts(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& r : corpus.records()) {
    texts.push_back(corpus.ExpandClaim(r.patent_id, r.claim_no));
  }
  return texts;
}

std::vector<TokenSequence> BuildSequences(const Corpus& corpus,
                                          const Vocabulary& vocab,
                                          DirectionMode mode,
                                          const SequenceOptions& options) {
  if (corpus.empty()) throw UsageError("cannot build sequences: empty corpus");
  std::vector<TokenSequence> forward;
  forward.reserve(corpus.size());
  for (const auto& text : ExpandedTexts(corpus)) {
    forward.push_back(vocab.Encode(text));
  }
  auto reversed = [&](const TokenSequence& seq) {
    TokenSequence out;
    out.reserve(seq.size() + 1);
    if (options.backward_marker) out.push_back(*options.backward_marker);
    out.insert(out.end(), seq.rbegin(), seq.rend());
    return out;
  };
  std::vector<TokenSequence> result;
  if (mode != DirectionMode::kBackwardOnly) result = forward;
  if (mode != DirectionMode::kForwardOnly) {
    for (const auto& seq : forward) result.push_back(reversed(seq));
  }
  return result;
}

CorpusSplit Split(const Corpus& corpus, double eval_fraction,
                  std::uint64_t seed) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw UsageError("eval fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = corpus.size();
  if (n < 2) throw UsageError("splitting needs at least 2 records");
  auto n_eval = static_cast<std::size_t>(
      std::llround(eval_fraction * static_cast<double>(n)));
  n_eval = std::clamp<std::size_t>(n_eval, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[internal::UniformIndex(rng, i + 1)]);
  }
  std::vector<bool> is_eval(n, false);
  for (std::size_t i = 0; i < n_eval; ++i) is_eval[order[i]] = true;
  std::vector<bool> is_train(n);
  for (std::size_t i = 0; i < n; ++i) is_train[i] = !is_eval[i];
  return {Subset(corpus, is_train), Subset(corpus, is_eval)};
}

CorpusSplit SplitByYear(const Corpus& corpus, int cutoff_year) {
  std::vector<bool> is_train(corpus.size());
  std::vector<bool> is_eval(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus.records()[i];
    if (!r.year) {
      throw DataError(KeyName(r.patent_id, r.claim_no) +
                      " has no year; cannot split by year");
    }
    is_train[i] = *r.year <= cutoff_year;
    is_eval[i] = !is_train[i];
  }
  return {Subset(corpus, is_train), Subset(corpus, is_eval)};
}

Corpus FilterByCpc(const Corpus& corpus, const std::string& prefix) {
  std::vector<bool> keep(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& cpc = corpus.records()[i].cpc;
    keep[i] = cpc && cpc->rfind(prefix, 0) == 0;
  }
  return Subset(corpus, keep);
}

}  // namespace keysave
