// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/session.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace keysave {
namespace {

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Joins two reading-order fragments, inserting a space between two words.
std::string Join(const std::string& left, const std::string& right) {
  if (left.empty()) return right;
  if (right.empty()) return left;
  if (IsWordByte(static_cast<unsigned char>(left.back())) &&
      IsWordByte(static_cast<unsigned char>(right.front()))) {
    return left + " " + right;
  }
  return left + right;
}

bool IsSingleCodePoint(const std::string& s) {
  if (s.empty()) return false;
  const auto lead = static_cast<unsigned char>(s[0]);
  std::size_t len = lead < 0x80 ? 1 : (lead >> 5) == 0x6 ? 2
                                  : (lead >> 4) == 0xE ? 3
                                  : (lead >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || s.size() != len) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
  });
}

void PopCodePoint(std::string& s) {
  while (!s.empty() && (static_cast<unsigned char>(s.back()) & 0xC0) == 0x80) {
    s.pop_back();
  }
  if (!s.empty()) s.pop_back();
}

constexpr std::size_t kMaxContext = 1024;

}  // namespace

class SessionStore::Session {
 public:
  Session(std::string id, SessionConfig config, ModelEntry model)
      : id_(std::move(id)),
        config_(std::move(config)),
        model_(std::move(model)),
        direction_(config_.direction) {}

  SessionSnapshot Snapshot() const {
    std::lock_guard lock(mu_);
    return SnapshotLocked();
  }

  Prediction Suggestions() const {
    std::lock_guard lock(mu_);
    return SuggestionsLocked();
  }

  std::vector<std::string> SuggestionSurfaces() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& c : SuggestionsLocked().candidates) {
      out.emplace_back(model_.vocab->Surface(c.id).surface);
    }
    return out;
  }

  SessionSnapshot Apply(const KeyEvent& event) {
    std::lock_guard lock(mu_);
    switch (event.type) {
      case KeyEvent::Type::kDigit: ApplyDigit(event.digit); break;
      case KeyEvent::Type::kChar: ApplyChar(event.character); break;
      case KeyEvent::Type::kToggle:
        CommitPending();
        pending_.clear();
        direction_ = Opposite(direction_);
        break;
      case KeyEvent::Type::kBackspace:
        ++actual_;
        if (!pending_.empty()) {
          PopCodePoint(pending_);
          if (direction_ == Direction::kForward) PopCodePoint(text_);
          --manual_;
        }
        break;
    }
    log_.push_back(event);
    ++version_;
    return SnapshotLocked();
  }

  std::vector<KeyEvent> Log() const {
    std::lock_guard lock(mu_);
    return log_;
  }

  const SessionConfig& config() const { return config_; }

 private:
  std::string ReadingText() const {
    return direction_ == Direction::kForward ? text_ : Join(pending_, text_);
  }

  SessionSnapshot SnapshotLocked() const {
    SessionSnapshot s;
    s.session_id = id_;
    s.model_tag = config_.model_tag;
    s.design = config_.design;
    s.direction = direction_;
    s.k = config_.k;
    s.text = ReadingText();
    s.pending = pending_;
    s.actual = actual_;
    s.manual_equivalent = manual_;
    s.events = log_.size();
    if (manual_ > 0) {
      s.ae = (static_cast<double>(manual_) - static_cast<double>(actual_)) /
             static_cast<double>(manual_);
    }
    return s;
  }

  Prediction SuggestionsLocked() const {
    if (cache_ && cache_version_ == version_) return *cache_;
    const TokenSequence tokens = model_.vocab->Encode(ReadingText());
    std::span<const TokenId> context(tokens);
    if (context.size() > kMaxContext) {
      // Keep the tokens nearest the cursor.
      context = direction_ == Direction::kForward
                    ? context.last(kMaxContext)
                    : context.first(kMaxContext);
    }
    cache_ = model_.predictor->Predict(context, direction_, config_.k);
    cache_version_ = version_;
    return *cache_;
  }

  void ApplyDigit(unsigned digit) {
    const Prediction suggestions = SuggestionsLocked();
    if (digit >= suggestions.candidates.size()) {
      throw EventRejectedError("digit " + std::to_string(digit) +
                               " is beyond the " +
                               std::to_string(suggestions.candidates.size()) +
                               " current suggestions");
    }
    const TokenId id = suggestions.candidates[digit].id;
    const auto surface = model_.vocab->Surface(id);
    actual_ += SelectionCost(config_.design, digit + 1, config_.k);
    manual_ += surface.stripped_length;
    std::string piece(surface.surface);
    if (direction_ == Direction::kForward) {
      if (text_.empty() || IsSpace(static_cast<unsigned char>(text_.back()))) {
        const auto first = piece.find_first_not_of(' ');
        if (first != std::string::npos) piece.erase(0, first);
      }
      text_ += piece;
      pending_.clear();
    } else {
      CommitPending();
      text_ = Join(piece, text_);
    }
  }

  void ApplyChar(const std::string& c) {
    if (!IsSingleCodePoint(c)) {
      throw UsageError("char events carry exactly one UTF-8 character");
    }
    const bool space = IsSpace(static_cast<unsigned char>(c[0]));
    ++actual_;
    if (!space) ++manual_;
    if (direction_ == Direction::kForward) {
      text_ += c;
      if (space) {
        pending_.clear();
      } else {
        pending_ += c;
      }
    } else if (space) {
      CommitPending();
    } else {
      pending_ += c;
    }
  }

  // Backward only: the typed word becomes part of the committed text.
  void CommitPending() {
    if (direction_ == Direction::kBackward && !pending_.empty()) {
      text_ = Join(pending_, text_);
    }
    pending_.clear();
  }

  mutable std::mutex mu_;
  const std::string id_;
  const SessionConfig config_;
  const ModelEntry model_;
  Direction direction_;
  std::string text_;
  std::string pending_;
  std::uint64_t actual_ = 0;
  std::uint64_t manual_ = 0;
  std::uint64_t version_ = 0;
  std::vector<KeyEvent> log_;
  mutable std::optional<Prediction> cache_;
  mutable std::uint64_t cache_version_ = 0;
};

void SessionStore::RegisterModel(const std::string& tag, ModelEntry entry) {
  if (!entry.predictor || !entry.vocab) {
    throw UsageError("model '" + tag + "' needs a predictor and a vocabulary");
  }
  std::unique_lock lock(mu_);
  models_[tag] = std::move(entry);
}

std::vector<std::string> SessionStore::model_tags() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> tags;
  for (const auto& [tag, entry] : models_) tags.push_back(tag);
  return tags;
}

ModelEntry SessionStore::model(const std::string& tag) const {
  std::shared_lock lock(mu_);
  auto it = models_.find(tag);
  if (it == models_.end()) throw NotFoundError("unknown model '" + tag + "'");
  return it->second;
}

std::string SessionStore::Create(const SessionConfig& config) {
  const ModelEntry entry = model(config.model_tag);
  if (config.k < 1 || config.k > kMaxK || config.k > entry.vocab->size()) {
    throw UsageError("session k must be between 1 and " +
                     std::to_string(kMaxK));
  }
  std::unique_lock lock(mu_);
  if (salt_ == 0) salt_ = (std::random_device{}() | 1u);
  char id[40];
  std::snprintf(id, sizeof id, "s%llx-%08llx",
                static_cast<unsigned long long>(next_id_),
                static_cast<unsigned long long>((next_id_ * 0x9E3779B1u) ^ salt_) &
                    0xFFFFFFFFull);
  ++next_id_;
  sessions_.emplace(id, std::make_shared<Session>(id, config, entry));
  return id;
}

std::shared_ptr<SessionStore::Session> SessionStore::Find(
    const std::string& session_id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw NotFoundError("unknown session '" + session_id + "'");
  }
  return it->second;
}

SessionSnapshot SessionStore::Snapshot(const std::string& session_id) const {
  return Find(session_id)->Snapshot();
}

Prediction SessionStore::Suggestions(const std::string& session_id) const {
  return Find(session_id)->Suggestions();
}

std::vector<std::string> SessionStore::SuggestionSurfaces(
    const std::string& session_id) const {
  return Find(session_id)->SuggestionSurfaces();
}

SessionSnapshot SessionStore::Apply(const std::string& session_id,
                                    const KeyEvent& event) {
  return Find(session_id)->Apply(event);
}

std::vector<KeyEvent> SessionStore::EventLog(
    const std::string& session_id) const {
  return Find(session_id)->Log();
}

SessionConfig SessionStore::Config(const std::string& session_id) const {
  return Find(session_id)->config();
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

}  // namespace keysave
