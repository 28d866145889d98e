// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "keysave/error.hpp"

namespace keysave {
namespace {

std::string ShortestDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string OptionalPercent(const std::optional<double>& ratio) {
  return ratio ? FormatPercent(*ratio) : std::string();
}

std::string UpperStart(const std::string& start) {
  if (start.size() == 2 && start[0] == 'q') {
    return std::string("Q") + start[1];
  }
  return start;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

ExperimentRow RowFromBatch(const ClaimBatch& batch, const RunConfig& config,
                           std::string direction, std::string design,
                           std::string start) {
  ExperimentRow row;
  row.model_tag = config.model_tag;
  row.direction = std::move(direction);
  row.design = std::move(design);
  row.start = std::move(start);
  row.n_claims = batch.results.size();
  row.skipped = batch.skipped;
  if (!batch.results.empty()) {
    const auto pooled = Aggregate(batch.results, config.pooling);
    row.new_ratio = pooled.ae_ratio;
    row.keys_manual = pooled.ledger.keys_manual;
    row.keys_auto = pooled.ledger.keys_auto;
  }
  return row;
}

}  // namespace

StartPosition StartPosition::Fraction(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw UsageError("start fraction must lie strictly between 0 and 1");
  }
  return {Kind::kFraction, r};
}

std::string StartPosition::Name() const {
  switch (kind) {
    case Kind::kBegin: return "begin";
    case Kind::kEnd: return "end";
    case Kind::kFraction:
      if (fraction == 0.25) return "q1";
      if (fraction == 0.5) return "q2";
      if (fraction == 0.75) return "q3";
      return "frac:" + ShortestDouble(fraction);
  }
  return "?";
}

StartPosition StartPosition::Parse(std::string_view text) {
  if (text == "begin") return Begin();
  if (text == "end") return End();
  if (text == "q1") return Q1();
  if (text == "q2") return Q2();
  if (text == "q3") return Q3();
  if (text.rfind("frac:", 0) == 0) {
    const auto number = text.substr(5);
    double r = 0.0;
    auto [ptr, ec] =
        std::from_chars(number.data(), number.data() + number.size(), r);
    if (ec == std::errc() && ptr == number.data() + number.size()) {
      return Fraction(r);
    }
  }
  throw UsageError("unknown start position '" + std::string(text) + "'");
}

std::size_t PositionIndex(const StartPosition& pos, std::size_t token_count,
                          bool interior) {
  if (token_count < 2) {
    throw UsageError("position needs a text of at least 2 tokens");
  }
  if (interior && token_count < 3) {
    throw UsageError("interior positions need at least 3 tokens");
  }
  std::size_t index = 0;
  switch (pos.kind) {
    case StartPosition::Kind::kBegin: index = 0; break;
    case StartPosition::Kind::kEnd: index = token_count - 1; break;
    case StartPosition::Kind::kFraction: {
      // The small epsilon keeps r*T that should be integral (0.1 * 30) from
      // rounding up to the next token.
      const double nth =
          std::ceil(pos.fraction * static_cast<double>(token_count) - 1e-9);
      index = nth < 1.0 ? 0 : static_cast<std::size_t>(nth) - 1;
      index = std::min(index, token_count - 1);
      break;
    }
  }
  if (interior) index = std::clamp<std::size_t>(index, 1, token_count - 2);
  return index;
}

double Increase(double previous_ratio, double new_ratio) {
  if (!(previous_ratio > 0.0)) {
    throw UsageError("increase is undefined for a non-positive previous ratio");
  }
  return (new_ratio - previous_ratio) / previous_ratio;
}

TraversalPlan PlanSpec::Resolve(std::size_t token_count) const {
  return {PositionIndex(start, token_count, start.interior()), first_leg};
}

ClaimBatch EvaluateClaims(const Predictor& predictor, const Vocabulary& vocab,
                          std::span<const TokenSequence> claims,
                          const PlanSpec& plan, UiDesign design,
                          const EngineOptions& options, unsigned jobs) {
  std::vector<std::size_t> eligible;
  ClaimBatch batch;
  for (std::size_t i = 0; i < claims.size(); ++i) {
    if (claims[i].size() >= plan.min_tokens()) {
      eligible.push_back(i);
    } else {
      ++batch.skipped;
    }
  }
  batch.results.resize(eligible.size());
  auto run_one = [&](std::size_t slot) {
    const auto& tokens = claims[eligible[slot]];
    batch.results[slot] = Evaluate(predictor, vocab, tokens,
                                   plan.Resolve(tokens.size()), design, options);
  };
  const unsigned workers = std::max(
      1u, std::min<unsigned>(jobs, static_cast<unsigned>(eligible.size())));
  if (workers <= 1) {
    for (std::size_t s = 0; s < eligible.size(); ++s) run_one(s);
    return batch;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t s; (s = next.fetch_add(1)) < eligible.size();) {
        try {
          run_one(s);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
          next = eligible.size();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return batch;
}

ExperimentRow RunEval(const Predictor& predictor, const Vocabulary& vocab,
                      std::span<const TokenSequence> claims,
                      const PlanSpec& plan, UiDesign design,
                      const RunConfig& config) {
  const auto batch = EvaluateClaims(predictor, vocab, claims, plan, design,
                                    config.engine, config.jobs);
  return RowFromBatch(batch, config, std::string(DirectionName(plan.first_leg)),
                      std::string(DesignName(design)), plan.start.Name());
}

std::vector<ExperimentRow> RunDesignComparison(
    const Predictor& predictor, const Vocabulary& vocab,
    std::span<const TokenSequence> claims, std::span<const Direction> directions,
    const RunConfig& config) {
  if (claims.empty()) throw UsageError("design comparison needs claims");
  std::vector<ExperimentRow> rows;
  for (const Direction direction : directions) {
    const auto plan = PlanSpec::ForDirection(direction);
    const auto legacy =
        EvaluateClaims(predictor, vocab, claims, plan,
                       UiDesign::kLegacyArrowTab, config.engine, config.jobs);
    const auto digit =
        EvaluateClaims(predictor, vocab, claims, plan, UiDesign::kDigitKeys,
                       config.engine, config.jobs);
    auto row = RowFromBatch(digit, config,
                            std::string(DirectionName(direction)),
                            "legacy->digit", plan.start.Name());
    if (!legacy.results.empty()) {
      row.previous_ratio = Aggregate(legacy.results, config.pooling).ae_ratio;
    }
    if (row.previous_ratio && row.new_ratio && *row.previous_ratio > 0.0) {
      row.increase = Increase(*row.previous_ratio, *row.new_ratio);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ExperimentRow> RunPositionSweep(
    const Predictor& predictor, const Vocabulary& vocab,
    std::span<const TokenSequence> claims,
    std::span<const StartPosition> positions,
    std::span<const Direction> first_legs, UiDesign design,
    const RunConfig& config) {
  if (claims.empty()) throw UsageError("position sweep needs claims");
  std::vector<ExperimentRow> rows;
  for (const auto& position : positions) {
    for (const Direction leg : first_legs) {
      rows.push_back(
          RunEval(predictor, vocab, claims, PlanSpec{position, leg}, design,
                  config));
    }
  }
  return rows;
}

std::vector<ExperimentRow> RunPredictorComparison(
    std::span<const TaggedPredictor> predictors, const Vocabulary& vocab,
    std::span<const TokenSequence> claims, std::span<const Direction> directions,
    UiDesign design, const RunConfig& config) {
  std::vector<ExperimentRow> rows;
  for (const auto& tagged : predictors) {
    if (!tagged.predictor) throw UsageError("null predictor in comparison");
    RunConfig tagged_config = config;
    tagged_config.model_tag = tagged.tag;
    for (const Direction direction : directions) {
      rows.push_back(RunEval(*tagged.predictor, vocab, claims,
                             PlanSpec::ForDirection(direction), design,
                             tagged_config));
    }
  }
  return rows;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown") return ReportFormat::kMarkdown;
  throw UsageError("unknown report format '" + std::string(name) + "'");
}

std::string FormatPercent(double ratio) {
  // nearbyint honours the default round-to-nearest-even mode.
  const auto tenths = static_cast<long long>(std::nearbyint(ratio * 1000.0));
  const bool negative = tenths < 0;
  const long long mag = negative ? -tenths : tenths;
  return (negative ? "-" : "") + std::to_string(mag / 10) + "." +
         std::to_string(mag % 10);
}

std::string EmitReport(std::span<const ExperimentRow> rows,
                       ReportFormat format) {
  if (rows.empty()) throw UsageError("cannot emit a report with no rows");
  const bool comparison = rows.front().previous_ratio.has_value();
  for (const auto& row : rows) {
    if (row.previous_ratio.has_value() != comparison) {
      throw UsageError("report rows mix design comparisons with other rows");
    }
    for (const auto* field : {&row.model_tag, &row.direction, &row.design,
                              &row.start}) {
      if (field->find_first_of(",|\n") != std::string::npos) {
        throw UsageError("report field '" + *field +
                         "' contains a separator character");
      }
    }
  }
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
      out << r.model_tag << ',' << r.direction << ',' << r.design << ','
          << r.start << ',' << OptionalPercent(r.previous_ratio) << ','
          << OptionalPercent(r.new_ratio) << ',' << OptionalPercent(r.increase)
          << ',' << r.keys_manual << ',' << r.keys_auto << ',' << r.n_claims
          << ',' << r.skipped << '\n';
    }
    return out.str();
  }

  auto pct = [](const std::optional<double>& v) {
    return v ? FormatPercent(*v) + "%" : std::string("n/a");
  };
  if (comparison) {
    out << "| Model | Direction | Previous Ratio | New Ratio | Increase |\n"
        << "|---|---|---|---|---|\n";
    for (const auto& r : rows) {
      out << "| " << r.model_tag << " | " << r.direction << " | "
          << pct(r.previous_ratio) << " | " << pct(r.new_ratio) << " | "
          << pct(r.increase) << " |\n";
    }
    return out.str();
  }
  // Pivot: one line per (model, direction), one column per start position,
  // both in order of first appearance.
  std::vector<std::string> starts;
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::pair<std::string, std::string>, std::string>,
           std::optional<double>>
      cells;
  for (const auto& r : rows) {
    if (std::find(starts.begin(), starts.end(), r.start) == starts.end()) {
      starts.push_back(r.start);
    }
    std::pair<std::string, std::string> key{r.model_tag, r.direction};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      keys.push_back(key);
    }
    cells[{key, r.start}] = r.new_ratio;
  }
  out << "| Model | Direction |";
  for (const auto& s : starts) out << ' ' << UpperStart(s) << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < starts.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& key : keys) {
    out << "| " << key.first << " | " << key.second << " |";
    for (const auto& s : starts) {
      auto it = cells.find({key, s});
      out << ' ' << (it == cells.end() ? std::string("") : pct(it->second))
          << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::vector<ExperimentRow> ParseReportCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw DataError("report CSV must start with the header: " +
                    std::string(kCsvHeader));
  }
  auto ratio = [](const std::string& field,
                  std::size_t line_no) -> std::optional<double> {
    if (field.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw DataError("report line " + std::to_string(line_no) +
                      ": bad percentage '" + field + "'");
    }
    return v / 100.0;
  };
  auto count = [](const std::string& field, std::size_t line_no) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw DataError("report line " + std::to_string(line_no) +
                      ": bad count '" + field + "'");
    }
    return v;
  };
  std::vector<ExperimentRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 11) {
      throw DataError("report line " + std::to_string(line_no) + " has " +
                      std::to_string(f.size()) + " fields, expected 11");
    }
    ExperimentRow r;
    r.model_tag = f[0];
    r.direction = f[1];
    r.design = f[2];
    r.start = f[3];
    r.previous_ratio = ratio(f[4], line_no);
    r.new_ratio = ratio(f[5], line_no);
    r.increase = ratio(f[6], line_no);
    r.keys_manual = count(f[7], line_no);
    r.keys_auto = count(f[8], line_no);
    r.n_claims = count(f[9], line_no);
    r.skipped = count(f[10], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace keysave
