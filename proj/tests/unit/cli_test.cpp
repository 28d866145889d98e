// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "keysave/corpus.hpp"
#include "keysave/experiments.hpp"

namespace keysave {
namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome RunAe(std::vector<std::string> args) {
  args.insert(args.begin(), "ae");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Builds data, vocabulary and both direction models once.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    Must({"data", "synth", "--out", F("all.jsonl"), "--target-bytes", "40000"});
    Must({"data", "split", "--input", F("all.jsonl"), "--out", F("train.jsonl"),
          "--eval-out", F("eval.jsonl"), "--eval-fraction", "0.1", "--seed", "4"});
    Must({"tokenizer", "train", "--input", F("train.jsonl"), "--out", F("vocab.txt"),
          "--scheme", "bpe", "--vocab-size", "600"});
    Must({"model", "train", "--input", F("train.jsonl"), "--vocab", F("vocab.txt"),
          "--out", F("fwd.ngram"), "--direction-mode", "forward"});
    Must({"model", "train", "--input", F("train.jsonl"), "--vocab", F("vocab.txt"),
          "--out", F("bwd.ngram"), "--direction-mode", "backward", "--order", "3"});
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string F(const std::string& name) { return dir_->file(name); }
  static void Must(std::vector<std::string> args) {
    const auto r = RunAe(args);
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static std::vector<std::string> Models() {
    return {"--vocab", F("vocab.txt"), "--model", F("fwd.ngram"), "--model", F("bwd.ngram")};
  }
  static testing::TempDir* dir_;
};

testing::TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, EvalPrintsCsv) {
  auto args = std::vector<std::string>{"eval", "--data", F("eval.jsonl"), "--design",
                                       "digit", "--direction", "forward", "--top-k", "10"};
  for (auto& a : Models()) args.push_back(a);
  const auto r = RunAe(args);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto rows = ParseReportCsv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].direction, "forward");
  EXPECT_EQ(rows[0].design, "digit");
  EXPECT_TRUE(rows[0].new_ratio.has_value());
}

TEST_F(CliTest, ExperimentsAndReport) {
  auto args = std::vector<std::string>{"experiment", "position-sweep", "--input",
                                       F("eval.jsonl"), "--out", F("sweep.csv"),
                                       "--jobs", "3"};
  for (auto& a : Models()) args.push_back(a);
  auto r = RunAe(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = Slurp(F("sweep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);

  r = RunAe({"report", "--input", F("sweep.csv"), "--format", "markdown"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| Q1 | Q2 | Q3 |"), std::string::npos);

  args = {"experiment", "design-compare", "--input", F("eval.jsonl"), "--format", "markdown"};
  for (auto& a : Models()) args.push_back(a);
  r = RunAe(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Increase"), std::string::npos);

  r = RunAe({"experiment", "predictor-compare", "--input", F("eval.jsonl"), "--vocab",
             F("vocab.txt"), "--predictor", "both=" + F("fwd.ngram") + "+" + F("bwd.ngram"),
             "--predictor", "fwd=" + F("fwd.ngram"), "--direction", "forward"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\nfwd,forward,digit,begin"), std::string::npos) << r.out;
}

TEST_F(CliTest, ShortClaimIsSkipped) {
  ClaimRecord rec;
  rec.patent_id = "P1";
  rec.claim_no = 1;
  rec.text = "A cat";
  WriteClaimsFile(F("short.jsonl"), {rec});
  auto args = std::vector<std::string>{"eval", "--input", F("short.jsonl"), "--start",
                                       "q2", "--first-leg", "backward"};
  for (auto& a : Models()) args.push_back(a);
  const auto r = RunAe(args);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto rows = ParseReportCsv(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].skipped, 1u);
  EXPECT_EQ(rows[0].n_claims, 0u);
}

TEST_F(CliTest, FixedSeedOutputsAreReproducible) {
  Must({"data", "synth", "--out", F("again.jsonl"), "--target-bytes", "40000"});
  EXPECT_EQ(Slurp(F("again.jsonl")), Slurp(F("all.jsonl")));
  Must({"data", "split", "--input", F("all.jsonl"), "--out", F("train2.jsonl"),
        "--eval-out", F("eval2.jsonl"), "--eval-fraction", "0.1", "--seed", "4"});
  EXPECT_EQ(Slurp(F("eval2.jsonl")), Slurp(F("eval.jsonl")));
  Must({"tokenizer", "train", "--input", F("train.jsonl"), "--out", F("vocab2.txt"),
        "--scheme", "bpe", "--vocab-size", "600"});
  EXPECT_EQ(Slurp(F("vocab2.txt")), Slurp(F("vocab.txt")));
  Must({"model", "train", "--input", F("train.jsonl"), "--vocab", F("vocab.txt"),
        "--out", F("fwd2.ngram"), "--direction-mode", "forward"});
  EXPECT_EQ(Slurp(F("fwd2.ngram")), Slurp(F("fwd.ngram")));
}

TEST_F(CliTest, ExitCodes) {
  auto r = RunAe({"eval", "--bogus"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(RunAe({}).code, cli::kExitUsage);
  EXPECT_EQ(RunAe({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(RunAe({"eval", "--input", F("eval.jsonl"), "--vocab", F("vocab.txt"),
                   "--design", "fancy", "--model", F("fwd.ngram")})
                .code,
            cli::kExitUsage);
  // Backward queries without a backward model.
  EXPECT_EQ(RunAe({"eval", "--input", F("eval.jsonl"), "--vocab", F("vocab.txt"),
                   "--direction", "backward", "--model", F("fwd.ngram")})
                .code,
            cli::kExitUsage);

  auto args = std::vector<std::string>{"eval", "--input", F("missing.jsonl")};
  for (auto& a : Models()) args.push_back(a);
  r = RunAe(args);
  EXPECT_EQ(r.code, cli::kExitData);
  EXPECT_NE(r.err.find("missing.jsonl"), std::string::npos);

  std::ofstream(F("broken.jsonl")) << "{\"patent_id\": 3}\n";
  args[2] = F("broken.jsonl");
  EXPECT_EQ(RunAe(args).code, cli::kExitData);

  r = RunAe({"eval", "--input", F("eval.jsonl"), "--vocab", F("vocab.txt"),
             "--endpoint", "http://127.0.0.1:1"});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("127.0.0.1:1"), std::string::npos);
}

}  // namespace
}  // namespace keysave
