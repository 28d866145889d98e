// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_SESSION_HPP_
#define KEYSAVE_SESSION_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "keysave/ae_engine.hpp"
#include "keysave/error.hpp"
#include "keysave/predictor.hpp"
#include "keysave/tokenizer.hpp"

namespace keysave {

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A key event the session refused (digit beyond the suggestion list). The
// session is left unchanged.
class EventRejectedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KeyEvent {
  enum class Type { kDigit, kChar, kToggle, kBackspace };
  Type type = Type::kChar;
  unsigned digit = 0;       // kDigit
  std::string character;    // kChar: one UTF-8 character

  static KeyEvent Digit(unsigned d) { return {Type::kDigit, d, {}}; }
  static KeyEvent Char(std::string c) { return {Type::kChar, 0, std::move(c)}; }
  static KeyEvent Toggle() { return {Type::kToggle, 0, {}}; }
  static KeyEvent Backspace() { return {Type::kBackspace, 0, {}}; }

  friend bool operator==(const KeyEvent&, const KeyEvent&) = default;
};

struct SessionSnapshot {
  std::string session_id;
  std::string model_tag;
  UiDesign design = UiDesign::kDigitKeys;
  Direction direction = Direction::kForward;
  std::size_t k = 10;
  // Reading-order document including the word being typed.
  std::string text;
  std::string pending;
  // Keys actually pressed vs. keys needed to type the same text by hand.
  std::uint64_t actual = 0;
  std::uint64_t manual_equivalent = 0;
  std::uint64_t events = 0;
  // (manual_equivalent - actual) / manual_equivalent; absent while
  // manual_equivalent is 0.
  std::optional<double> ae;

  friend bool operator==(const SessionSnapshot&,
                         const SessionSnapshot&) = default;
};

struct ModelEntry {
  std::shared_ptr<const Predictor> predictor;
  std::shared_ptr<const Vocabulary> vocab;
};

struct SessionConfig {
  UiDesign design = UiDesign::kDigitKeys;
  Direction direction = Direction::kForward;
  std::size_t k = 10;
  std::string model_tag;
};

// In-memory interactive sessions; the single authority for keystroke
// counters.
//
// Accounting per event:
//   digit d    accept suggestion d (rank d + 1) on the cursor side;
//              actual += selection cost, manual += stripped token length
//   char c     actual += 1; manual += 1 unless c is whitespace. Forward
//              input goes straight into the text; backward input collects
//              a word that whitespace (or any commit) prepends.
//   toggle     commits the pending word and flips direction
//   backspace  actual += 1; drops the last pending character
//
// Sessions are isolated from each other; events within a session are
// applied serially.
class SessionStore {
 public:
  static constexpr std::size_t kMaxK = 10;

  void RegisterModel(const std::string& tag, ModelEntry entry);
  std::vector<std::string> model_tags() const;
  // Throws NotFoundError.
  ModelEntry model(const std::string& tag) const;

  // Throws NotFoundError for an unknown model, UsageError for k outside
  // [1, 10] or beyond the vocabulary.
  std::string Create(const SessionConfig& config);

  SessionSnapshot Snapshot(const std::string& session_id) const;
  Prediction Suggestions(const std::string& session_id) const;
  // Surfaces of the current suggestions, in rank order.
  std::vector<std::string> SuggestionSurfaces(
      const std::string& session_id) const;
  SessionSnapshot Apply(const std::string& session_id, const KeyEvent& event);

  std::vector<KeyEvent> EventLog(const std::string& session_id) const;
  SessionConfig Config(const std::string& session_id) const;

  std::size_t size() const;

 private:
  class Session;
  std::shared_ptr<Session> Find(const std::string& session_id) const;

  mutable std::shared_mutex mu_;
  std::map<std::string, ModelEntry> models_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t salt_ = 0;
};

}  // namespace keysave

#endif  // KEYSAVE_SESSION_HPP_
