// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/ngram.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "keysave/error.hpp"

namespace keysave {
namespace {

constexpr std::string_view kMagic = "keysave-ngram v1";

bool Better(double score, TokenId id, const Candidate& than) {
  return score > than.score || (score == than.score && id < than.id);
}

// Keeps the k best candidates sorted by (score desc, id asc).
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  bool full() const { return items_.size() == k_; }
  const Candidate& worst() const { return items_.back(); }

  // Returns false once (score, id) cannot enter a full list.
  bool Offer(TokenId id, double score) {
    if (full() && !Better(score, id, worst())) return false;
    auto pos = std::find_if(items_.begin(), items_.end(),
                            [&](const Candidate& c) {
                              return Better(score, id, c);
                            });
    items_.insert(pos, Candidate{id, score});
    if (items_.size() > k_) items_.pop_back();
    return true;
  }

  bool Contains(TokenId id) const {
    return std::any_of(items_.begin(), items_.end(),
                       [&](const Candidate& c) { return c.id == id; });
  }

  std::vector<Candidate> Take() { return std::move(items_); }
  std::size_t size() const { return items_.size(); }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

bool HasSuccessor(const std::vector<NgramModel::Successor>& by_id,
                  TokenId id) {
  auto it = std::lower_bound(
      by_id.begin(), by_id.end(), id,
      [](const NgramModel::Successor& s, TokenId v) { return s.id < v; });
  return it != by_id.end() && it->id == id;
}

}  // namespace

std::size_t NgramModel::KeyHash::operator()(
    const std::vector<TokenId>& key) const {
  std::uint64_t h = 1469598103934665603ull ^ key.size();
  for (TokenId id : key) {
    h ^= id;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

NgramModel::NgramModel(std::size_t vocab_size, NgramOptions options,
                       Table table)
    : vocab_size_(vocab_size), options_(options), table_(std::move(table)) {}

void NgramModel::Finalize(Entry& entry) {
  entry.by_id = entry.by_count;
  std::sort(entry.by_id.begin(), entry.by_id.end(),
            [](const Successor& a, const Successor& b) { return a.id < b.id; });
  std::sort(entry.by_count.begin(), entry.by_count.end(),
            [](const Successor& a, const Successor& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.id < b.id;
            });
  entry.total = 0;
  for (const auto& s : entry.by_count) entry.total += s.count;
}

NgramModel NgramModel::Train(std::span<const TokenSequence> sequences,
                             std::size_t vocab_size,
                             const NgramOptions& options) {
  if (options.order < 1) throw UsageError("n-gram order must be at least 1");
  if (!(options.discount > 0.0 && options.discount < 1.0)) {
    throw UsageError("backoff discount must lie strictly between 0 and 1");
  }
  const bool any = std::any_of(sequences.begin(), sequences.end(),
                               [](const auto& s) { return !s.empty(); });
  if (!any) throw UsageError("cannot train an n-gram model on no tokens");

  Table table;
  for (int len = 1; len <= options.order; ++len) {
    // Every window of `len` tokens: context = first len-1, successor = last.
    std::vector<const TokenId*> windows;
    for (const auto& seq : sequences) {
      for (const auto id : seq) {
        if (id >= vocab_size) {
          throw DataError("training token id " + std::to_string(id) +
                          " exceeds vocabulary size " +
                          std::to_string(vocab_size));
        }
      }
      if (seq.size() < static_cast<std::size_t>(len)) continue;
      for (std::size_t start = 0; start + len <= seq.size(); ++start) {
        windows.push_back(seq.data() + start);
      }
    }
    std::sort(windows.begin(), windows.end(),
              [len](const TokenId* a, const TokenId* b) {
                return std::lexicographical_compare(a, a + len, b, b + len);
              });
    std::size_t i = 0;
    while (i < windows.size()) {
      std::size_t j = i;
      while (j < windows.size() &&
             std::equal(windows[i], windows[i] + len, windows[j])) {
        ++j;
      }
      std::vector<TokenId> context(windows[i], windows[i] + len - 1);
      table[std::move(context)].by_count.push_back(
          {windows[i][len - 1], static_cast<std::uint64_t>(j - i)});
      i = j;
    }
  }
  for (auto& [context, entry] : table) Finalize(entry);
  return NgramModel(vocab_size, options, std::move(table));
}

const NgramModel::Entry* NgramModel::Find(
    std::span<const TokenId> context) const {
  auto it = table_.find(std::vector<TokenId>(context.begin(), context.end()));
  return it == table_.end() ? nullptr : &it->second;
}

std::uint64_t NgramModel::Count(std::span<const TokenId> context,
                                TokenId next) const {
  const Entry* entry = Find(context);
  if (!entry) return 0;
  auto it = std::lower_bound(
      entry->by_id.begin(), entry->by_id.end(), next,
      [](const Successor& s, TokenId v) { return s.id < v; });
  return it != entry->by_id.end() && it->id == next ? it->count : 0;
}

std::uint64_t NgramModel::ContextTotal(std::span<const TokenId> context) const {
  const Entry* entry = Find(context);
  return entry ? entry->total : 0;
}

Prediction NgramModel::PredictNext(std::span<const TokenId> context,
                                   std::size_t k) const {
  if (k == 0) throw UsageError("top-k requires k >= 1");
  if (k > vocab_size_) {
    throw UsageError("k = " + std::to_string(k) +
                     " exceeds vocabulary size " + std::to_string(vocab_size_));
  }
  const std::size_t max_len =
      std::min(context.size(), static_cast<std::size_t>(options_.order - 1));
  auto suffix = [&](std::size_t len) {
    return context.subspan(context.size() - len, len);
  };

  // Entries from the longest observed suffix down to the unigram table.
  std::vector<const Entry*> levels;
  std::size_t start_len = max_len;
  while (!Find(suffix(start_len))) --start_len;
  for (std::size_t len = start_len + 1; len-- > 0;) {
    levels.push_back(Find(suffix(len)));
  }

  TopK top(k);
  double weight = 1.0;
  for (std::size_t level = 0; level < levels.size(); ++level) {
    const Entry* entry = levels[level];
    if (entry) {
      const double total = static_cast<double>(entry->total);
      for (const auto& s : entry->by_count) {
        bool seen_higher = false;
        for (std::size_t h = 0; h < level && !seen_higher; ++h) {
          seen_higher = levels[h] && HasSuccessor(levels[h]->by_id, s.id);
        }
        if (seen_higher) continue;
        const double score = weight * (static_cast<double>(s.count) / total);
        if (!top.Offer(s.id, score)) break;
      }
    }
    weight *= options_.discount;
  }
  for (TokenId id = 0; !top.full() && id < vocab_size_; ++id) {
    if (!top.Contains(id)) top.Offer(id, 0.0);
  }
  return Prediction{top.Take(), Direction::kForward};
}

bool operator==(const NgramModel& a, const NgramModel& b) {
  if (a.vocab_size_ != b.vocab_size_ ||
      a.options_.order != b.options_.order ||
      a.options_.discount != b.options_.discount ||
      a.options_.trained_on != b.options_.trained_on ||
      a.table_.size() != b.table_.size()) {
    return false;
  }
  for (const auto& [context, entry] : a.table_) {
    auto it = b.table_.find(context);
    if (it == b.table_.end() || it->second.total != entry.total ||
        it->second.by_count.size() != entry.by_count.size()) {
      return false;
    }
    for (std::size_t i = 0; i < entry.by_count.size(); ++i) {
      if (entry.by_count[i].id != it->second.by_count[i].id ||
          entry.by_count[i].count != it->second.by_count[i].count) {
        return false;
      }
    }
  }
  return true;
}

void NgramModel::Save(std::ostream& out) const {
  char discount[32];
  std::snprintf(discount, sizeof discount, "%.17g", options_.discount);
  out << kMagic << '\n'
      << "order=" << options_.order << " discount=" << discount
      << " vocab_size=" << vocab_size_
      << " trained_on=" << DirectionModeName(options_.trained_on) << '\n';
  std::vector<const Table::value_type*> rows;
  rows.reserve(table_.size());
  for (const auto& row : table_) rows.push_back(&row);
  std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
    if (a->first.size() != b->first.size()) {
      return a->first.size() < b->first.size();
    }
    return a->first < b->first;
  });
  for (const auto* row : rows) {
    for (std::size_t i = 0; i < row->first.size(); ++i) {
      out << (i ? " " : "") << row->first[i];
    }
    out << '\t';
    for (std::size_t i = 0; i < row->second.by_id.size(); ++i) {
      const auto& s = row->second.by_id[i];
      out << (i ? " " : "") << s.id << ':' << s.count;
    }
    out << '\n';
  }
}

void NgramModel::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  Save(out);
}

NgramModel NgramModel::Load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw DataError("not a keysave n-gram model file");
  }
  if (!std::getline(in, line)) throw DataError("n-gram model lacks a header");
  NgramOptions options;
  std::size_t vocab_size = 0;
  {
    std::istringstream header(line);
    std::string field;
    int seen = 0;
    while (header >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw DataError("bad model header field");
      const auto key = field.substr(0, eq);
      const auto value = field.substr(eq + 1);
      try {
        if (key == "order") {
          options.order = std::stoi(value);
        } else if (key == "discount") {
          options.discount = std::stod(value);
        } else if (key == "vocab_size") {
          vocab_size = std::stoul(value);
        } else if (key == "trained_on") {
          options.trained_on = ParseDirectionMode(value);
        } else {
          throw DataError("unknown model header field '" + key + "'");
        }
      } catch (const std::logic_error&) {
        throw DataError("bad value for model header field '" + key + "'");
      }
      ++seen;
    }
    if (seen != 4 || options.order < 1 || vocab_size == 0) {
      throw DataError("incomplete n-gram model header");
    }
  }
  Table table;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("model line " + std::to_string(line_no) + " lacks a tab");
    }
    std::vector<TokenId> context;
    std::istringstream ctx(line.substr(0, tab));
    for (unsigned long id; ctx >> id;) context.push_back(static_cast<TokenId>(id));
    if (context.size() >= static_cast<std::size_t>(options.order)) {
      throw DataError("model line " + std::to_string(line_no) +
                      " has a context longer than order - 1");
    }
    Entry entry;
    std::istringstream succ(line.substr(tab + 1));
    std::string item;
    while (succ >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw DataError("model line " + std::to_string(line_no) +
                        ": bad successor '" + item + "'");
      }
      Successor s{};
      try {
        s.id = static_cast<TokenId>(std::stoul(item.substr(0, colon)));
        s.count = std::stoull(item.substr(colon + 1));
      } catch (const std::logic_error&) {
        throw DataError("model line " + std::to_string(line_no) +
                        ": bad successor '" + item + "'");
      }
      if (s.id >= vocab_size || s.count == 0) {
        throw DataError("model line " + std::to_string(line_no) +
                        ": successor out of range or zero count");
      }
      entry.by_count.push_back(s);
    }
    if (entry.by_count.empty()) {
      throw DataError("model line " + std::to_string(line_no) +
                      " has no successors");
    }
    Finalize(entry);
    table.emplace(std::move(context), std::move(entry));
  }
  if (!table.count({})) throw DataError("n-gram model lacks a unigram table");
  return NgramModel(vocab_size, options, std::move(table));
}

NgramModel NgramModel::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path + "'");
  return Load(in);
}

}  // namespace keysave
