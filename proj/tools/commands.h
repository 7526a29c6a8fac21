// Copyright 2026 The snap-nulling Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SNAP_TOOLS_COMMANDS_H_
#define SNAP_TOOLS_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "snap/eval_metrics.h"
#include "snap/linear_classifier.h"
#include "snap/synth_bench.h"

namespace snap::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// One per command run, written as JSON next to the primary output.
struct RunManifest {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  double duration_seconds = 0.0;

  // Hashes every input and output file; outputs must exist.
  nlohmann::json ToJson() const;
  void Write(const std::string& path) const;
};

std::string Sha256File(const std::string& path);
std::string DefaultManifestPath(const std::string& primary_output);

struct FitOptions {
  std::string train_path;
  std::string model_path;
  std::string manifest_path;  // empty: <model>.manifest.json
  int k = 5;
  std::uint64_t seed = 42;
  double split = 0.8;
  TrainConfig train;
};

struct FitResult {
  std::optional<double> validation_eer;
  int train_records = 0;
  int validation_records = 0;
  int epochs_run = 0;
};

FitResult CmdFit(const FitOptions& opts, std::ostream& log);

struct ScoreOptions {
  std::string model_path;
  std::string data_path;
  std::string scores_path;
  std::string manifest_path;
};

ScoredSet CmdScore(const ScoreOptions& opts, std::ostream& log);

struct EvalOptions {
  std::string scores_path;
  std::string report_path;
  std::string manifest_path;
  double threshold = 0.5;
};

EvalReport CmdEval(const EvalOptions& opts, std::ostream& log);

struct SynthOptions {
  std::string config_path;  // optional JSON
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string truth_path;  // empty: <out>.truth.json
  std::string manifest_path;
};

SynthData CmdSynth(const SynthOptions& opts, std::ostream& log);

struct AnalyzeOptions {
  std::string data_path;
  std::string model_path;  // optional
  std::string report_path;
  std::string plot_path;  // optional gnuplot data
  std::string manifest_path;
};

EntanglementReport CmdAnalyze(const AnalyzeOptions& opts, std::ostream& log);

struct SweepOptions {
  std::string config_path;
  std::vector<int> counts = {2, 4, 8, 16};
  int k = 5;
  std::uint64_t seed = 42;
  int repeats = 1;  // seeds seed, seed + 1, ...; medians reported
  TrainConfig train;
  std::string out_path;
  std::string manifest_path;
};

std::vector<SweepRow> CmdSweep(const SweepOptions& opts, std::ostream& log);

// Parses argv and dispatches. Returns the process exit code; errors are
// reported as one line on `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snap::cli

#endif  // SNAP_TOOLS_COMMANDS_H_
