// Copyright 2026 The keysave Authors
// SPDX-License-Identifier: Apache-2.0

#include "keysave/synth.hpp"

#include <array>
#include <random>
#include <string>
#include <string_view>

#include "random.hpp"

namespace keysave {
namespace {

using Words = std::vector<std::string_view>;

struct Domain {
  std::string_view cpc;
  Words nouns;
  Words purposes;
};

const std::array<Domain, 4>& Domains() {
  static const std::array<Domain, 4> kDomains = {{
      {"G06N",
       {"neural network", "training data set", "machine learning model",
        "hidden layer", "weight matrix", "loss function", "feature vector",
        "embedding", "attention module", "inference engine", "label",
        "gradient", "classifier", "token sequence", "language model",
        "decoder", "encoder", "prediction", "input sample", "output layer"},
       {"training a neural network", "generating text",
        "classifying input data", "predicting a next token",
        "compressing a machine learning model"}},
      {"H04L",
       {"network node", "data packet", "routing table", "client device",
        "server", "communication channel", "header field", "session key",
        "transmission queue", "access point", "payload", "network interface",
        "message", "protocol stack", "timer", "bandwidth allocation",
        "encryption key", "connection request", "gateway", "acknowledgment"},
       {"routing data packets", "establishing a secure session",
        "allocating bandwidth", "transmitting a message",
        "authenticating a client device"}},
      {"A61B",
       {"sensor", "patient", "physiological signal", "electrode",
        "imaging device", "processing unit", "measurement", "heart rate",
        "probe", "display unit", "wearable housing", "light source",
        "detector", "blood pressure", "threshold value", "alarm",
        "medical record", "signal processor", "catheter", "image frame"},
       {"monitoring a patient", "measuring a physiological signal",
        "imaging a tissue region", "detecting an abnormal heart rate",
        "estimating blood pressure"}},
      {"B60W",
       {"vehicle", "driver", "steering angle", "control unit",
        "camera module", "lidar sensor", "trajectory", "obstacle",
        "braking force", "lane marking", "speed profile", "actuator",
        "map data", "road segment", "collision risk", "wheel",
        "powertrain", "driving mode", "target object", "occupant"},
       {"controlling a vehicle", "planning a trajectory",
        "detecting an obstacle", "assisting a driver",
        "estimating a collision risk"}},
  }};
  return kDomains;
}

const Words kAdjectives = {
    "first", "second", "third", "plurality of", "predetermined", "adjusted",
    "corresponding", "respective", "updated", "initial", "selected",
    "remote", "local", "primary", "secondary", "modified", "candidate",
    "stored", "estimated", "target"};

const Words kVerbs = {
    "receive", "determine", "generate", "transmit", "store", "compare",
    "select", "update", "compute", "identify", "output", "process",
    "detect", "adjust", "encode", "decode", "filter", "analyze"};

const Words kGerunds = {
    "receiving", "determining", "generating", "transmitting", "storing",
    "comparing", "selecting", "updating", "computing", "identifying",
    "outputting", "processing", "detecting", "adjusting", "encoding",
    "decoding", "filtering", "analyzing"};

const Words kPrepositions = {"from", "to", "based on", "using", "for",
                             "associated with", "within", "in response to"};

const Words kSubjects = {"system", "method", "apparatus", "device",
                         "non-transitory computer-readable medium"};

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  std::string_view Pick(const Words& words) {
    return words[internal::UniformIndex(rng_, words.size())];
  }
  std::size_t Range(std::size_t lo, std::size_t hi) {
    return lo + internal::UniformIndex(rng_, hi - lo + 1);
  }
  bool Chance(unsigned percent) { return Range(1, 100) <= percent; }

  std::string NounPhrase(const Words& nouns, bool definite) {
    std::string out = definite ? "the " : "a ";
    if (Chance(40)) {
      const auto adj = Pick(kAdjectives);
      if (!definite && (adj[0] == 'i' || adj[0] == 'u')) out = "an ";
      out += std::string(adj) + " ";
    }
    out += Pick(nouns);
    return out;
  }

  std::string Element(const Words& nouns) {
    std::string out = NounPhrase(nouns, false);
    out += Chance(50) ? " configured to " : " operable to ";
    out += std::string(Pick(kVerbs)) + " " + NounPhrase(nouns, true);
    if (Chance(60)) {
      out += " " + std::string(Pick(kPrepositions)) + " " +
             NounPhrase(nouns, true);
    }
    return out;
  }

  std::string Step(const Words& nouns) {
    std::string out = std::string(Pick(kGerunds)) + " " +
                      NounPhrase(nouns, Chance(50));
    out += " " + std::string(Pick(kPrepositions)) + " " +
           NounPhrase(nouns, true);
    return out;
  }

  std::string Independent(const Domain& d, std::string_view subject) {
    const bool method = subject == "method";
    std::string out = std::string(subject == "apparatus" ? "An " : "A ") +
                      std::string(subject) + " for " +
                      std::string(Pick(d.purposes)) + ", " +
                      (method ? "the method comprising: " : "comprising: ");
    const std::size_t parts = Range(3, 5);
    for (std::size_t i = 0; i < parts; ++i) {
      if (i > 0) out += i + 1 == parts ? "; and " : "; ";
      out += method ? Step(d.nouns) : Element(d.nouns);
    }
    return out + ".";
  }

  std::string Dependent(const Domain& d, std::string_view subject,
                        int parent) {
    std::string out = "The " + std::string(subject) + " of claim " +
                      std::to_string(parent) + ", wherein " +
                      NounPhrase(d.nouns, true);
    switch (Range(0, 3)) {
      case 0:
        out += " is configured to " + std::string(Pick(kVerbs)) + " " +
               NounPhrase(d.nouns, true);
        break;
      case 1:
        out += " comprises " + NounPhrase(d.nouns, false);
        break;
      case 2:
        out += " is selected from the group consisting of " +
               std::string(Pick(d.nouns)) + ", " + std::string(Pick(d.nouns)) +
               ", and " + std::string(Pick(d.nouns));
        break;
      default:
        out += " is " + std::string(Pick(kAdjectives)) + " " +
               std::string(Pick(kPrepositions)) + " " +
               NounPhrase(d.nouns, true);
    }
    return out + ".";
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

std::vector<ClaimRecord> GenerateSyntheticClaims(const SynthOptions& options) {
  Generator gen(options.seed);
  std::vector<ClaimRecord> records;
  std::size_t bytes = 0;
  for (int patent = 1; bytes < options.target_bytes; ++patent) {
    const auto& domain = Domains()[gen.Range(0, Domains().size() - 1)];
    const auto subject = gen.Pick(kSubjects);
    const auto year = static_cast<int>(gen.Range(2015, 2022));
    const std::string patent_id = "SYN" + std::to_string(1000000 + patent);
    auto add = [&](int claim_no, std::optional<int> parent, std::string text) {
      bytes += text.size();
      records.push_back({patent_id, claim_no, parent, std::move(text),
                         std::string(domain.cpc), year});
    };
    add(1, std::nullopt, gen.Independent(domain, subject));
    const int dependents = static_cast<int>(gen.Range(1, 4));
    for (int c = 2; c <= dependents + 1; ++c) {
      const int parent = gen.Chance(70) ? 1 : static_cast<int>(gen.Range(1, c - 1));
      add(c, parent, gen.Dependent(domain, subject, parent));
    }
  }
  return records;
}

}  // namespace keysave
