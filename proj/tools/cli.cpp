// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "keysave/bidirectional.hpp"
#include "keysave/corpus.hpp"
#include "keysave/experiments.hpp"
#include "keysave/ngram.hpp"
#include "keysave/remote.hpp"
#include "keysave/server.hpp"
#include "keysave/synth.hpp"
#include "keysave/tokenizer.hpp"

namespace keysave::cli {
namespace {

struct Options {
  std::string input;
  std::string out;
  std::string eval_out;
  std::string vocab;
  std::size_t vocab_size = Vocabulary::kDefaultBpeSize;
  std::string scheme = "bpe";
  int order = 4;
  double discount = 0.4;
  std::string direction_mode = "forward";
  std::vector<std::string> directions;
  std::string design = "digit";
  std::vector<std::string> starts;
  std::vector<std::string> first_legs;
  std::size_t top_k = 10;
  std::uint64_t seed = 2023;
  std::size_t max_context = 1024;
  std::string pooling = "micro";
  unsigned jobs = 1;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string format = "csv";
  std::vector<std::string> models;
  std::string endpoint;
  std::string model_tag = "model";
  std::vector<std::string> predictors;
  std::optional<int> year_cutoff;
  double eval_fraction = 0.1;
  std::string cpc;
  bool skip_empty_tokens = false;
  bool legacy_cap = false;
  std::size_t target_bytes = 2 * 1024 * 1024;
  std::string static_dir;
};

void WriteOutput(const Options& opt, const std::string& text,
                 std::ostream& out) {
  if (opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw DataError("cannot open '" + opt.out + "' for writing");
  file << text;
}

Corpus LoadCorpus(const Options& opt) {
  auto corpus = Corpus::Ingest(ReadClaimsFile(opt.input));
  if (!opt.cpc.empty()) corpus = FilterByCpc(corpus, opt.cpc);
  if (corpus.empty()) throw DataError("no claims in '" + opt.input + "'");
  return corpus;
}

std::vector<TokenSequence> EncodeClaims(const Corpus& corpus,
                                        const Vocabulary& vocab) {
  return BuildSequences(corpus, vocab, DirectionMode::kForwardOnly);
}

// Builds the predictor from --model files (direction read from each file)
// or from --endpoint.
std::shared_ptr<const Predictor> LoadPredictor(
    const std::vector<std::string>& model_paths, const std::string& endpoint,
    const Vocabulary& vocab) {
  if (!endpoint.empty()) {
    if (!model_paths.empty()) {
      throw UsageError("--endpoint and --model are mutually exclusive");
    }
    return std::make_shared<RemotePredictor>(endpoint, vocab.size());
  }
  if (model_paths.empty()) throw UsageError("--model or --endpoint required");
  std::shared_ptr<const NgramModel> forward, backward, mixed;
  for (const auto& path : model_paths) {
    auto model = std::make_shared<const NgramModel>(NgramModel::LoadFile(path));
    if (model->vocab_size() != vocab.size()) {
      throw DataError("model '" + path + "' was trained for a vocabulary of " +
                      std::to_string(model->vocab_size()) + " entries");
    }
    auto& slot = model->trained_on() == DirectionMode::kForwardOnly ? forward
                 : model->trained_on() == DirectionMode::kBackwardOnly
                     ? backward
                     : mixed;
    if (slot) throw UsageError("two models given for the same direction");
    slot = std::move(model);
  }
  if (mixed) {
    if (forward || backward) {
      throw UsageError("a mixed model cannot be combined with other models");
    }
    return std::make_shared<BidirectionalPredictor>(
        BidirectionalPredictor::Mixed(mixed));
  }
  return std::make_shared<BidirectionalPredictor>(
      BidirectionalPredictor::Dual(forward, backward));
}

RunConfig MakeRunConfig(const Options& opt) {
  RunConfig config;
  config.model_tag = opt.model_tag;
  config.engine.k = opt.top_k;
  config.engine.max_context = opt.max_context;
  config.engine.skip_empty_tokens = opt.skip_empty_tokens;
  config.engine.cap_legacy_cost = opt.legacy_cap;
  config.pooling = ParsePooling(opt.pooling);
  config.jobs = opt.jobs;
  return config;
}

std::vector<Direction> ParseDirections(const std::vector<std::string>& names,
                                       std::vector<Direction> fallback) {
  if (names.empty()) return fallback;
  std::vector<Direction> out;
  for (const auto& n : names) out.push_back(ParseDirection(n));
  return out;
}

void RunTokenizerTrain(const Options& opt) {
  const auto corpus = LoadCorpus(opt);
  const auto texts = ExpandedTexts(corpus);
  const auto vocab =
      Vocabulary::Train(texts, opt.vocab_size, ParseScheme(opt.scheme));
  vocab.SaveFile(opt.out);
}

void RunModelTrain(const Options& opt, std::ostream& err) {
  auto corpus = LoadCorpus(opt);
  if (opt.year_cutoff) corpus = SplitByYear(corpus, *opt.year_cutoff).train;
  const auto vocab = Vocabulary::LoadFile(opt.vocab);
  const auto mode = ParseDirectionMode(opt.direction_mode);
  const auto sequences = BuildSequences(corpus, vocab, mode);
  NgramOptions options;
  options.order = opt.order;
  options.discount = opt.discount;
  options.trained_on = mode;
  const auto model = NgramModel::Train(sequences, vocab.size(), options);
  model.SaveFile(opt.out);
  err << "trained " << DirectionModeName(mode) << " order-" << opt.order
      << " model on " << sequences.size() << " sequences ("
      << model.num_contexts() << " contexts)\n";
}

void RunEvalCommand(const Options& opt, std::ostream& out) {
  const auto vocab = Vocabulary::LoadFile(opt.vocab);
  const auto predictor = LoadPredictor(opt.models, opt.endpoint, vocab);
  const auto claims = EncodeClaims(LoadCorpus(opt), vocab);
  PlanSpec plan;
  if (!opt.starts.empty()) {
    if (opt.starts.size() > 1 || opt.first_legs.size() > 1) {
      throw UsageError("eval takes one --start and one --first-leg");
    }
    plan.start = StartPosition::Parse(opt.starts.front());
    plan.first_leg = opt.first_legs.empty()
                         ? (plan.start.kind == StartPosition::Kind::kEnd
                                ? Direction::kBackward
                                : Direction::kForward)
                         : ParseDirection(opt.first_legs.front());
  } else {
    if (opt.directions.size() > 1) throw UsageError("eval takes one --direction");
    plan = PlanSpec::ForDirection(opt.directions.empty()
                                      ? Direction::kForward
                                      : ParseDirection(opt.directions.front()));
  }
  const auto row = RunEval(*predictor, vocab, claims, plan,
                           ParseDesign(opt.design), MakeRunConfig(opt));
  WriteOutput(opt, EmitReport(std::span(&row, 1), ParseReportFormat(opt.format)),
              out);
}

void RunDesignCompare(const Options& opt, std::ostream& out) {
  const auto vocab = Vocabulary::LoadFile(opt.vocab);
  const auto predictor = LoadPredictor(opt.models, opt.endpoint, vocab);
  const auto claims = EncodeClaims(LoadCorpus(opt), vocab);
  const auto directions = ParseDirections(
      opt.directions, {Direction::kForward, Direction::kBackward});
  const auto rows = RunDesignComparison(*predictor, vocab, claims, directions,
                                        MakeRunConfig(opt));
  WriteOutput(opt, EmitReport(rows, ParseReportFormat(opt.format)), out);
}

void RunPositionSweepCommand(const Options& opt, std::ostream& out) {
  const auto vocab = Vocabulary::LoadFile(opt.vocab);
  const auto predictor = LoadPredictor(opt.models, opt.endpoint, vocab);
  const auto claims = EncodeClaims(LoadCorpus(opt), vocab);
  std::vector<StartPosition> positions;
  for (const auto& s : opt.starts) positions.push_back(StartPosition::Parse(s));
  if (positions.empty()) {
    positions = {StartPosition::Q1(), StartPosition::Q2(), StartPosition::Q3()};
  }
  const auto legs = ParseDirections(
      opt.first_legs, {Direction::kForward, Direction::kBackward});
  const auto rows =
      RunPositionSweep(*predictor, vocab, claims, positions, legs,
                       ParseDesign(opt.design), MakeRunConfig(opt));
  WriteOutput(opt, EmitReport(rows, ParseReportFormat(opt.format)), out);
}

// --predictor TAG=path[+path]
void RunPredictorCompare(const Options& opt, std::ostream& out) {
  const auto vocab = Vocabulary::LoadFile(opt.vocab);
  const auto claims = EncodeClaims(LoadCorpus(opt), vocab);
  std::vector<std::shared_ptr<const Predictor>> owned;
  std::vector<TaggedPredictor> tagged;
  for (const auto& spec : opt.predictors) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--predictor expects TAG=model[+model], got '" + spec + "'");
    }
    std::vector<std::string> paths;
    std::stringstream list(spec.substr(eq + 1));
    for (std::string p; std::getline(list, p, '+');) paths.push_back(p);
    owned.push_back(LoadPredictor(paths, "", vocab));
    tagged.push_back({spec.substr(0, eq), owned.back().get()});
  }
  if (tagged.empty()) throw UsageError("give at least one --predictor");
  const auto directions = ParseDirections(
      opt.directions, {Direction::kForward, Direction::kBackward});
  const auto rows = RunPredictorComparison(tagged, vocab, claims, directions,
                                           ParseDesign(opt.design),
                                           MakeRunConfig(opt));
  WriteOutput(opt, EmitReport(rows, ParseReportFormat(opt.format)), out);
}

void RunReport(const Options& opt, std::ostream& out) {
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw DataError("cannot open report '" + opt.input + "'");
  const auto rows = ParseReportCsv(in);
  WriteOutput(opt, EmitReport(rows, ParseReportFormat(opt.format)), out);
}

HttpServer* g_server = nullptr;

void RunServe(const Options& opt, std::ostream& err) {
  auto vocab = std::make_shared<const Vocabulary>(Vocabulary::LoadFile(opt.vocab));
  SessionStore store;
  store.RegisterModel(opt.model_tag,
                      {LoadPredictor(opt.models, opt.endpoint, *vocab), vocab});
  HttpServer server(store, opt.model_tag, opt.static_dir);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->Stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->Stop();
  });
  err << "serving model '" << opt.model_tag << "' on http://" << opt.host
      << ':' << opt.port << "\n";
  const bool ok = server.Listen(opt.host, opt.port);
  g_server = nullptr;
  if (!ok) throw std::runtime_error("cannot listen on port " + std::to_string(opt.port));
}

void RunSynth(const Options& opt) {
  SynthOptions synth;
  synth.seed = opt.seed;
  synth.target_bytes = opt.target_bytes;
  WriteClaimsFile(opt.out, GenerateSyntheticClaims(synth));
}

void RunSplit(const Options& opt, std::ostream& err) {
  const auto corpus = LoadCorpus(opt);
  const auto split = opt.year_cutoff
                         ? SplitByYear(corpus, *opt.year_cutoff)
                         : Split(corpus, opt.eval_fraction, opt.seed);
  WriteClaimsFile(opt.out, split.train.records());
  WriteClaimsFile(opt.eval_out, split.eval.records());
  err << "train " << split.train.size() << " / eval " << split.eval.size()
      << " records\n";
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  Options opt;
  CLI::App app{"ae: autocomplete keystroke-saving toolkit"};
  app.require_subcommand(1);

  auto input = [&](CLI::App* cmd) {
    return cmd->add_option("--input,--data", opt.input, "Claim file (JSON Lines)")
        ->required();
  };
  auto output = [&](CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("--out", opt.out, "Output path");
    if (required) o->required();
  };
  auto model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--vocab", opt.vocab, "Vocabulary file")->required();
    cmd->add_option("--model", opt.models,
                    "n-gram model file; repeat for forward + backward");
    cmd->add_option("--endpoint", opt.endpoint,
                    "Remote predictor URL instead of --model");
    cmd->add_option("--model-tag", opt.model_tag, "Label for reports");
  };
  auto eval_flags = [&](CLI::App* cmd) {
    input(cmd);
    model_flags(cmd);
    output(cmd, false);
    cmd->add_option("--top-k", opt.top_k, "Suggestions per step")
        ->check(CLI::Range(1, 1 << 20));
    cmd->add_option("--max-context", opt.max_context, "Prompt window in tokens")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--pooling", opt.pooling, "micro|macro")
        ->check(CLI::IsMember({"micro", "macro"}));
    cmd->add_option("--jobs", opt.jobs, "Worker threads")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--format", opt.format, "csv|markdown")
        ->check(CLI::IsMember({"csv", "markdown"}));
    cmd->add_option("--cpc", opt.cpc, "Keep claims whose CPC tag has this prefix");
    cmd->add_option("--seed", opt.seed, "Seed (recorded for reproducibility)");
    cmd->add_flag("--skip-empty-tokens", opt.skip_empty_tokens,
                  "Do not count whitespace-only tokens");
    cmd->add_flag("--legacy-cap", opt.legacy_cap,
                  "Legacy selection costs min(rank, typed length)");
  };
  auto design_flag = [&](CLI::App* cmd) {
    cmd->add_option("--design", opt.design, "legacy|digit")
        ->check(CLI::IsMember({"legacy", "digit"}));
  };
  auto direction_check = CLI::IsMember({"forward", "backward"});

  auto* tokenizer = app.add_subcommand("tokenizer", "Tokenizer tools");
  tokenizer->require_subcommand(1);
  auto* tok_train = tokenizer->add_subcommand("train", "Train a vocabulary");
  input(tok_train);
  output(tok_train, true);
  tok_train->add_option("--vocab-size", opt.vocab_size, "BPE vocabulary size");
  tok_train->add_option("--scheme", opt.scheme, "bpe|whitespace")
      ->check(CLI::IsMember({"bpe", "whitespace"}));

  auto* model = app.add_subcommand("model", "Predictor tools");
  model->require_subcommand(1);
  auto* model_train = model->add_subcommand("train", "Train an n-gram model");
  input(model_train);
  output(model_train, true);
  model_train->add_option("--vocab", opt.vocab, "Vocabulary file")->required();
  model_train->add_option("--order", opt.order, "n-gram order")
      ->check(CLI::Range(1, 16));
  model_train->add_option("--discount", opt.discount, "Backoff discount in (0,1)");
  model_train->add_option("--direction-mode", opt.direction_mode,
                          "forward|backward|mixed")
      ->check(CLI::IsMember({"forward", "backward", "mixed"}));
  model_train->add_option("--year-cutoff", opt.year_cutoff,
                          "Train only on records up to this year");
  model_train->add_option("--cpc", opt.cpc, "Keep claims with this CPC prefix");

  auto* eval = app.add_subcommand("eval", "AE ratio of one configuration");
  eval_flags(eval);
  design_flag(eval);
  eval->add_option("--direction", opt.directions, "forward|backward")
      ->check(direction_check);
  eval->add_option("--start", opt.starts, "begin|end|q1|q2|q3|frac:<r>");
  eval->add_option("--first-leg", opt.first_legs, "forward|backward")
      ->check(direction_check);

  auto* experiment = app.add_subcommand("experiment", "Experiment runners");
  experiment->require_subcommand(1);
  auto* design_compare = experiment->add_subcommand(
      "design-compare", "Legacy arrow+tab vs digit-key selection");
  eval_flags(design_compare);
  design_compare->add_option("--direction", opt.directions, "forward|backward")
      ->check(direction_check);
  auto* sweep = experiment->add_subcommand("position-sweep",
                                           "AE ratio by starting position");
  eval_flags(sweep);
  design_flag(sweep);
  sweep->add_option("--start", opt.starts, "Positions (default q1 q2 q3)");
  sweep->add_option("--first-leg", opt.first_legs, "forward|backward")
      ->check(direction_check);
  auto* predictor_compare = experiment->add_subcommand(
      "predictor-compare", "Several predictors on one test set");
  input(predictor_compare);
  output(predictor_compare, false);
  predictor_compare->add_option("--vocab", opt.vocab, "Vocabulary file")
      ->required();
  predictor_compare->add_option("--predictor", opt.predictors,
                                "TAG=model[+model]")
      ->required();
  design_flag(predictor_compare);
  predictor_compare->add_option("--direction", opt.directions,
                                "forward|backward")
      ->check(direction_check);
  predictor_compare->add_option("--top-k", opt.top_k, "Suggestions per step");
  predictor_compare->add_option("--max-context", opt.max_context,
                                "Prompt window in tokens");
  predictor_compare->add_option("--pooling", opt.pooling, "micro|macro")
      ->check(CLI::IsMember({"micro", "macro"}));
  predictor_compare->add_option("--jobs", opt.jobs, "Worker threads");
  predictor_compare->add_option("--format", opt.format, "csv|markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));

  auto* report = app.add_subcommand("report", "Re-render a CSV report");
  report->add_option("--input", opt.input, "Report CSV")->required();
  output(report, false);
  report->add_option("--format", opt.format, "csv|markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));

  auto* serve = app.add_subcommand("serve", "HTTP autocomplete server");
  model_flags(serve);
  serve->add_option("--port", opt.port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", opt.host, "Bind address");
  serve->add_option("--static", opt.static_dir, "Directory with the web client");

  auto* data = app.add_subcommand("data", "Claim data helpers");
  data->require_subcommand(1);
  auto* synth = data->add_subcommand("synth", "Generate synthetic claims");
  output(synth, true);
  synth->add_option("--seed", opt.seed, "Generator seed");
  synth->add_option("--target-bytes", opt.target_bytes, "Approximate text size");
  auto* split = data->add_subcommand("split", "Train/eval split");
  input(split);
  output(split, true);
  split->add_option("--eval-out", opt.eval_out, "Eval claims path")->required();
  split->add_option("--eval-fraction", opt.eval_fraction, "Share of eval records");
  split->add_option("--seed", opt.seed, "Split seed");
  split->add_option("--year-cutoff", opt.year_cutoff,
                    "Split by year instead of at random");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (tok_train->parsed()) {
      RunTokenizerTrain(opt);
    } else if (model_train->parsed()) {
      RunModelTrain(opt, err);
    } else if (eval->parsed()) {
      RunEvalCommand(opt, out);
    } else if (design_compare->parsed()) {
      RunDesignCompare(opt, out);
    } else if (sweep->parsed()) {
      RunPositionSweepCommand(opt, out);
    } else if (predictor_compare->parsed()) {
      RunPredictorCompare(opt, out);
    } else if (report->parsed()) {
      RunReport(opt, out);
    } else if (serve->parsed()) {
      RunServe(opt, err);
    } else if (synth->parsed()) {
      RunSynth(opt);
    } else if (split->parsed()) {
      RunSplit(opt, err);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace keysave::cli
