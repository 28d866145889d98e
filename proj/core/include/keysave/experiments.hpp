// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef KEYSAVE_EXPERIMENTS_HPP_
#define KEYSAVE_EXPERIMENTS_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "keysave/ae_engine.hpp"
#include "keysave/predictor.hpp"
#include "keysave/tokenizer.hpp"

namespace keysave {

// Starting position of a traversal: the first token, the last token, or the
// token at a fraction of the text (q1/q2/q3 are 0.25/0.5/0.75).
struct StartPosition {
  enum class Kind { kBegin, kEnd, kFraction };
  Kind kind = Kind::kBegin;
  double fraction = 0.0;

  static StartPosition Begin() { return {Kind::kBegin, 0.0}; }
  static StartPosition End() { return {Kind::kEnd, 1.0}; }
  static StartPosition Fraction(double r);
  static StartPosition Q1() { return Fraction(0.25); }
  static StartPosition Q2() { return Fraction(0.5); }
  static StartPosition Q3() { return Fraction(0.75); }

  bool interior() const { return kind == Kind::kFraction; }
  // "begin", "end", "q1".."q3" or "frac:<r>".
  std::string Name() const;
  static StartPosition Parse(std::string_view text);

  friend bool operator==(const StartPosition&, const StartPosition&) = default;
};

// Zero-based start index for a text of `token_count` tokens. A fraction r
// selects the ceil(r*T)-th token (1-based), so Q1 of 100 tokens is index 24.
// With `interior` set the index is clamped to [1, T-2]. Throws UsageError
// when T < 2 (or T < 3 for interior).
std::size_t PositionIndex(const StartPosition& pos, std::size_t token_count,
                          bool interior = false);

// Relative change (new - previous) / previous. Throws UsageError when
// previous is not positive.
double Increase(double previous_ratio, double new_ratio);

struct PlanSpec {
  StartPosition start = StartPosition::Begin();
  Direction first_leg = Direction::kForward;

  static PlanSpec ForDirection(Direction direction) {
    return direction == Direction::kForward
               ? PlanSpec{StartPosition::Begin(), Direction::kForward}
               : PlanSpec{StartPosition::End(), Direction::kBackward};
  }
  // Minimum token count a claim needs for this plan.
  std::size_t min_tokens() const { return start.interior() ? 4 : 2; }
  TraversalPlan Resolve(std::size_t token_count) const;
};

struct ClaimBatch {
  std::vector<AeResult> results;
  std::size_t skipped = 0;
};

// Evaluates every claim long enough for `plan`; shorter ones are skipped and
// counted. Uses up to `jobs` threads; results keep claim order.
ClaimBatch EvaluateClaims(const Predictor& predictor, const Vocabulary& vocab,
                          std::span<const TokenSequence> claims,
                          const PlanSpec& plan, UiDesign design,
                          const EngineOptions& options, unsigned jobs = 1);

// One report row. Ratios are fractions in [.., 1]; absent fields print empty.
struct ExperimentRow {
  std::string model_tag;
  std::string direction;
  std::string design;
  std::string start;
  std::optional<double> previous_ratio;
  std::optional<double> new_ratio;
  std::optional<double> increase;
  std::uint64_t keys_manual = 0;
  std::uint64_t keys_auto = 0;
  std::size_t n_claims = 0;
  std::size_t skipped = 0;

  friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

struct RunConfig {
  std::string model_tag = "model";
  EngineOptions engine;
  Pooling pooling = Pooling::kMicro;
  unsigned jobs = 1;
};

// Single configuration: one row.
ExperimentRow RunEval(const Predictor& predictor, const Vocabulary& vocab,
                      std::span<const TokenSequence> claims,
                      const PlanSpec& plan, UiDesign design,
                      const RunConfig& config);

// Legacy (previous) vs digit (new) design per direction, using the plain
// begin/forward and end/backward plans. keys_* report the digit design.
std::vector<ExperimentRow> RunDesignComparison(
    const Predictor& predictor, const Vocabulary& vocab,
    std::span<const TokenSequence> claims, std::span<const Direction> directions,
    const RunConfig& config);

// One row per (position, first leg), positions outermost.
std::vector<ExperimentRow> RunPositionSweep(
    const Predictor& predictor, const Vocabulary& vocab,
    std::span<const TokenSequence> claims,
    std::span<const StartPosition> positions,
    std::span<const Direction> first_legs, UiDesign design,
    const RunConfig& config);

struct TaggedPredictor {
  std::string tag;
  const Predictor* predictor = nullptr;
};

// Several predictors on one test set: one row per (predictor, direction).
std::vector<ExperimentRow> RunPredictorComparison(
    std::span<const TaggedPredictor> predictors, const Vocabulary& vocab,
    std::span<const TokenSequence> claims, std::span<const Direction> directions,
    UiDesign design, const RunConfig& config);

enum class ReportFormat { kCsv, kMarkdown };
ReportFormat ParseReportFormat(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "model_tag,direction,design,start,previous_ratio,new_ratio,increase,"
    "keys_manual,keys_auto,n_claims,skipped";

// Percent with one decimal, round-half-even ("62.7" for 0.627).
std::string FormatPercent(double ratio);

// CSV: header plus one line per row. Markdown: design comparisons print the
// Previous/New/Increase table; other rows pivot into one column per start
// position. Throws UsageError on empty or mixed-schema input.
std::string EmitReport(std::span<const ExperimentRow> rows,
                       ReportFormat format);

// Reads rows back from EmitReport's CSV form. Throws DataError.
std::vector<ExperimentRow> ParseReportCsv(std::istream& in);

}  // namespace keysave

#endif  // KEYSAVE_EXPERIMENTS_HPP_
