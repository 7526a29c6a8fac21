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

#include "commands.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "snap/embedding_store.h"
#include "snap/error.h"
#include "snap/feature_pipeline.h"
#include "snap/model_io.h"
#include "snap/speaker_subspace.h"

namespace snap::cli {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Real17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json TrainJson(const TrainConfig& t) {
  nlohmann::json j = {{"learning_rate", t.learning_rate},
                      {"epochs", t.epochs},
                      {"l2_penalty", t.l2_penalty},
                      {"batch_size", t.batch_size},
                      {"seed", t.seed}};
  j["early_stop_patience"] =
      t.early_stop_patience ? nlohmann::json(*t.early_stop_patience) : nlohmann::json();
  return j;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void Finish(RunManifest& manifest, const std::string& manifest_path,
            Clock::time_point start) {
  manifest.duration_seconds = SecondsSince(start);
  manifest.Write(manifest_path.empty() ? DefaultManifestPath(manifest.outputs.front())
                                       : manifest_path);
}

SynthConfig LoadSynthConfig(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return SynthConfigFromJson(doc);
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool HasBothClasses(const LabeledEmbeddingSet& set) {
  bool pos = false, neg = false;
  for (const auto& r : set.records) (r.label == kSpoof ? pos : neg) = true;
  return pos && neg;
}

}  // namespace

std::string Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 initialisation failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof(byte), "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string DefaultManifestPath(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

nlohmann::json RunManifest::ToJson() const {
  const auto files = [](const std::vector<std::string>& paths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : paths) arr.push_back({{"path", p}, {"sha256", Sha256File(p)}});
    return arr;
  };
  nlohmann::json j = {{"command", command},
                      {"parameters", parameters},
                      {"inputs", files(inputs)},
                      {"outputs", files(outputs)},
                      {"tool_version", kToolVersion},
                      {"duration_seconds", duration_seconds}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json();
  return j;
}

void RunManifest::Write(const std::string& path) const {
  const nlohmann::json doc = ToJson();
  std::ofstream out = OpenOut(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

FitResult CmdFit(const FitOptions& opts, std::ostream& log) {
  const auto start = Clock::now();
  const LabeledEmbeddingSet data = PrepareSet(LoadEmbeddings(opts.train_path));
  if (!HasBothClasses(data)) {
    throw DegenerateInputError("training container needs both bona fide and spoof records");
  }
  auto [train, validation] = StratifiedSplit(data, opts.split, opts.seed);
  if (!HasBothClasses(train)) {
    throw DegenerateInputError("training split lost a class; use more data or a larger split");
  }

  SnapModel model;
  model.subspace = FitSpeakerSubspace(SpeakerCentroids(train), opts.k);
  const Eigen::MatrixXd x_train = NullProjectRows(model.subspace, train.EmbeddingMatrix());
  const std::vector<int> y_train = train.Labels();

  FitResult result;
  result.train_records = static_cast<int>(train.size());
  result.validation_records = static_cast<int>(validation.size());
  TrainResult trained;
  if (HasBothClasses(validation)) {
    const Eigen::MatrixXd x_val =
        NullProjectRows(model.subspace, validation.EmbeddingMatrix());
    const std::vector<int> y_val = validation.Labels();
    trained = Train(x_train, y_train, opts.train, LabeledMatrix{x_val, y_val});
    const Eigen::VectorXd p = PredictRows(trained.classifier, x_val);
    result.validation_eer =
        ComputeEer(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                   y_val)
            .eer;
  } else {
    log << "warning: validation split lacks a class; training without early stopping\n";
    trained = Train(x_train, y_train, opts.train);
  }
  model.classifier = trained.classifier;
  result.epochs_run = static_cast<int>(trained.trace.train_loss.size());

  model.metadata["default_k"] = std::to_string(kDefaultSubspaceRank);
  model.metadata["k_source"] = opts.k == kDefaultSubspaceRank ? "default" : "override";
  model.metadata["seed"] = std::to_string(opts.seed);
  model.metadata["split"] = Real17(opts.split);
  model.metadata["learning_rate"] = Real17(opts.train.learning_rate);
  model.metadata["epochs"] = std::to_string(opts.train.epochs);
  model.metadata["epochs_run"] = std::to_string(result.epochs_run);
  model.metadata["l2_penalty"] = Real17(opts.train.l2_penalty);
  model.metadata["train_records"] = std::to_string(result.train_records);
  model.metadata["validation_records"] = std::to_string(result.validation_records);
  model.metadata["train_sha256"] = Sha256File(opts.train_path);
  model.metadata["tool_version"] = kToolVersion;
  if (result.validation_eer) model.metadata["validation_eer"] = Real17(*result.validation_eer);
  SaveModel(model, opts.model_path);

  if (result.validation_eer) {
    char line[96];
    std::snprintf(line, sizeof(line), "validation EER %.2f%% (%d records)\n",
                  100.0 * *result.validation_eer, result.validation_records);
    log << line;
  }

  RunManifest manifest;
  manifest.command = "fit";
  manifest.parameters = {{"k", opts.k}, {"split", opts.split}, {"train", TrainJson(opts.train)}};
  manifest.inputs = {opts.train_path};
  manifest.outputs = {opts.model_path};
  manifest.seed = opts.seed;
  Finish(manifest, opts.manifest_path, start);
  return result;
}

ScoredSet CmdScore(const ScoreOptions& opts, std::ostream& log) {
  const auto start = Clock::now();
  const SnapModel model = LoadModel(opts.model_path);
  const LabeledEmbeddingSet raw = LoadEmbeddings(opts.data_path);
  if (raw.dim != model.subspace.dim()) {
    throw ShapeError("model dim " + std::to_string(model.subspace.dim()) +
                     " does not match container dim " + std::to_string(raw.dim));
  }
  const LabeledEmbeddingSet data = PrepareSet(raw);
  ScoredSet scored;
  scored.reserve(data.size());
  for (const auto& r : data.records) {
    scored.push_back({r.utt_id, r.label, model.Score(r.Embedding())});
  }
  {
    std::ofstream out = OpenOut(opts.scores_path);
    WriteScoreTable(scored, out);
  }
  log << "scored " << scored.size() << " utterances\n";

  RunManifest manifest;
  manifest.command = "score";
  manifest.inputs = {opts.model_path, opts.data_path};
  manifest.outputs = {opts.scores_path};
  Finish(manifest, opts.manifest_path, start);
  return scored;
}

EvalReport CmdEval(const EvalOptions& opts, std::ostream& log) {
  const auto start = Clock::now();
  std::ifstream in(opts.scores_path);
  if (!in) throw IoError("cannot open '" + opts.scores_path + "'");
  const ScoredSet scored = ReadScoreTable(in);
  const EvalReport report = Evaluate(scored, opts.threshold);
  WriteReportTable(report, log);
  {
    std::ofstream out = OpenOut(opts.report_path);
    WriteReportKeyValue(report, out);
  }
  RunManifest manifest;
  manifest.command = "eval";
  manifest.parameters = {{"threshold", opts.threshold}};
  manifest.inputs = {opts.scores_path};
  manifest.outputs = {opts.report_path};
  Finish(manifest, opts.manifest_path, start);
  return report;
}

SynthData CmdSynth(const SynthOptions& opts, std::ostream& log) {
  const auto start = Clock::now();
  SynthConfig cfg = LoadSynthConfig(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  SynthData data = Generate(cfg);
  WriteContainerFile(data.set, opts.out_path);
  const std::string truth_path =
      opts.truth_path.empty() ? opts.out_path + ".truth.json" : opts.truth_path;
  {
    std::ofstream out = OpenOut(truth_path);
    out << GroundTruthToJson(data.truth).dump() << '\n';
  }
  log << "wrote " << data.set.size() << " records (dim " << cfg.dim << ")\n";

  RunManifest manifest;
  manifest.command = "synth";
  manifest.parameters = SynthConfigToJson(cfg);
  if (!opts.config_path.empty()) manifest.inputs = {opts.config_path};
  manifest.outputs = {opts.out_path, truth_path};
  manifest.seed = cfg.seed;
  Finish(manifest, opts.manifest_path, start);
  return data;
}

EntanglementReport CmdAnalyze(const AnalyzeOptions& opts, std::ostream& log) {
  const auto start = Clock::now();
  const LabeledEmbeddingSet data = PrepareSet(LoadEmbeddings(opts.data_path));
  std::optional<SpeakerSubspace> subspace;
  if (!opts.model_path.empty()) subspace = LoadModel(opts.model_path).subspace;
  const EntanglementReport report = ComputeEntanglement(data, subspace);

  char line[128];
  log << "silhouette (cosine)   speaker    class\n";
  std::snprintf(line, sizeof(line), "baseline            %8.4f %8.4f\n",
                report.baseline_speaker.mean, report.baseline_class.mean);
  log << line;
  if (subspace) {
    std::snprintf(line, sizeof(line), "snap                %8.4f %8.4f\n",
                  report.snap_speaker->mean, report.snap_class->mean);
    log << line;
  }
  {
    std::ofstream out = OpenOut(opts.report_path);
    out << "baseline_speaker=" << Real17(report.baseline_speaker.mean) << '\n'
        << "baseline_class=" << Real17(report.baseline_class.mean) << '\n';
    if (subspace) {
      out << "snap_speaker=" << Real17(report.snap_speaker->mean) << '\n'
          << "snap_class=" << Real17(report.snap_class->mean) << '\n'
          << "k=" << subspace->k() << '\n';
    }
    out << "records=" << data.size() << '\n';
  }

  RunManifest manifest;
  manifest.command = "analyze";
  manifest.inputs = {opts.data_path};
  if (!opts.model_path.empty()) manifest.inputs.push_back(opts.model_path);
  manifest.outputs = {opts.report_path};

  if (!opts.plot_path.empty()) {
    // Per-sample coefficients, each column sorted descending, one row per rank.
    std::vector<Eigen::VectorXd> columns = {report.baseline_speaker.coefficients,
                                           report.baseline_class.coefficients};
    if (subspace) {
      columns.push_back(report.snap_speaker->coefficients);
      columns.push_back(report.snap_class->coefficients);
    }
    for (auto& c : columns) std::sort(c.data(), c.data() + c.size(), std::greater<>());
    std::ofstream out = OpenOut(opts.plot_path);
    out << "# rank baseline_speaker baseline_class"
        << (subspace ? " snap_speaker snap_class" : "") << '\n';
    for (Eigen::Index i = 0; i < columns.front().size(); ++i) {
      out << i;
      for (const auto& c : columns) out << ' ' << Real17(c(i));
      out << '\n';
    }
    manifest.outputs.push_back(opts.plot_path);
  }
  Finish(manifest, opts.manifest_path, start);
  return report;
}

std::vector<SweepRow> CmdSweep(const SweepOptions& opts, std::ostream& log) {
  const auto start = Clock::now();
  if (opts.repeats < 1) throw ConfigError("repeats must be >= 1");
  SynthConfig cfg = LoadSynthConfig(opts.config_path);

  std::vector<std::vector<double>> baseline(opts.counts.size()), snap(opts.counts.size());
  std::vector<SweepRow> rows;
  for (int rep = 0; rep < opts.repeats; ++rep) {
    cfg.seed = opts.seed + static_cast<std::uint64_t>(rep);
    rows = RunSpeakerSweep(cfg, opts.counts, opts.k, opts.train);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      baseline[i].push_back(rows[i].baseline_eer);
      snap[i].push_back(rows[i].snap_eer);
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].baseline_eer = Median(baseline[i]);
    rows[i].snap_eer = Median(snap[i]);
  }

  {
    std::ofstream out = OpenOut(opts.out_path);
    out << "# train_speakers k baseline_eer snap_eer"
        << (opts.repeats > 1 ? "  (medians over " + std::to_string(opts.repeats) + " seeds)" : "")
        << '\n';
    for (const auto& r : rows) {
      out << r.train_speakers << ' ' << r.k << ' ' << Real17(r.baseline_eer) << ' '
          << Real17(r.snap_eer) << '\n';
    }
  }
  char line[128];
  log << "speakers  k  baseline EER  SNAP EER\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%8d %2d  %10.2f%%  %7.2f%%\n", r.train_speakers,
                  r.k, 100.0 * r.baseline_eer, 100.0 * r.snap_eer);
    log << line;
  }

  RunManifest manifest;
  manifest.command = "sweep";
  std::vector<int> counts = opts.counts;
  manifest.parameters = {{"counts", counts},
                         {"k", opts.k},
                         {"repeats", opts.repeats},
                         {"synth", SynthConfigToJson(cfg)},
                         {"train", TrainJson(opts.train)}};
  manifest.parameters["synth"].erase("seed");
  if (!opts.config_path.empty()) manifest.inputs = {opts.config_path};
  manifest.outputs = {opts.out_path};
  manifest.seed = opts.seed;
  Finish(manifest, opts.manifest_path, start);
  return rows;
}

namespace {

void AddTrainFlags(CLI::App* cmd, TrainConfig& t, int& patience) {
  cmd->add_option("--lr", t.learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--epochs", t.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--l2", t.l2_penalty, "L2 penalty on the weights")->capture_default_str();
  cmd->add_option("--batch", t.batch_size, "Mini-batch size, 0 for full batch")
      ->capture_default_str();
  cmd->add_option("--patience", patience,
                  "Early-stop patience on validation BCE, 0 disables")
      ->capture_default_str();
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speaker-subspace nulling for synthetic speech detection"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  FitOptions fit;
  int fit_patience = 20;
  auto* fit_cmd = app.add_subcommand("fit", "Fit subspace and classifier on a container");
  fit_cmd->add_option("--train", fit.train_path, "Training container")->required();
  fit_cmd->add_option("--model", fit.model_path, "Output model file")->required();
  fit_cmd->add_option("--k", fit.k, "Speaker subspace rank")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Split and shuffle seed")->capture_default_str();
  fit_cmd->add_option("--split", fit.split, "Training fraction of the stratified split")
      ->capture_default_str();
  fit_cmd->add_option("--manifest", fit.manifest_path, "Manifest path");
  AddTrainFlags(fit_cmd, fit.train, fit_patience);

  ScoreOptions score;
  auto* score_cmd = app.add_subcommand("score", "Score a container with a fitted model");
  score_cmd->add_option("--model", score.model_path, "Model file")->required();
  score_cmd->add_option("--data", score.data_path, "Container to score")->required();
  score_cmd->add_option("--out", score.scores_path, "Output score table")->required();
  score_cmd->add_option("--manifest", score.manifest_path, "Manifest path");

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "EER and threshold metrics of a score table");
  eval_cmd->add_option("--scores", eval.scores_path, "Score table")->required();
  eval_cmd->add_option("--out", eval.report_path, "Key/value report")->required();
  eval_cmd->add_option("--threshold", eval.threshold, "Decision threshold")
      ->capture_default_str();
  eval_cmd->add_option("--manifest", eval.manifest_path, "Manifest path");

  SynthOptions synth;
  std::uint64_t synth_seed = 42;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labeled container");
  synth_cmd->add_option("--config", synth.config_path, "JSON generator config");
  auto* synth_seed_opt =
      synth_cmd->add_option("--seed", synth_seed, "Seed (overrides the config)");
  synth_cmd->add_option("--out", synth.out_path, "Output container")->required();
  synth_cmd->add_option("--truth", synth.truth_path, "Ground-truth JSON path");
  synth_cmd->add_option("--manifest", synth.manifest_path, "Manifest path");

  AnalyzeOptions analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Speaker/class silhouette report");
  analyze_cmd->add_option("--data", analyze.data_path, "Container")->required();
  analyze_cmd->add_option("--model", analyze.model_path, "Model whose subspace to null");
  analyze_cmd->add_option("--out", analyze.report_path, "Key/value report")->required();
  analyze_cmd->add_option("--plot-data", analyze.plot_path, "Gnuplot data file");
  analyze_cmd->add_option("--manifest", analyze.manifest_path, "Manifest path");

  SweepOptions sweep;
  int sweep_patience = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Training-speaker-count sweep on synthetic data");
  sweep_cmd->add_option("--config", sweep.config_path, "JSON generator config");
  sweep_cmd->add_option("--counts", sweep.counts, "Training speaker counts")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--k", sweep.k, "Speaker subspace rank")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed, "First seed")->capture_default_str();
  sweep_cmd->add_option("--repeats", sweep.repeats, "Number of seeds")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out_path, "Output table (gnuplot data)")->required();
  sweep_cmd->add_option("--manifest", sweep.manifest_path, "Manifest path");
  AddTrainFlags(sweep_cmd, sweep.train, sweep_patience);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const auto patience = [](int p) { return p > 0 ? std::optional<int>(p) : std::nullopt; };
  try {
    if (*fit_cmd) {
      fit.train.early_stop_patience = patience(fit_patience);
      fit.train.seed = fit.seed;
      CmdFit(fit, out);
    } else if (*score_cmd) {
      CmdScore(score, out);
    } else if (*eval_cmd) {
      CmdEval(eval, out);
    } else if (*synth_cmd) {
      if (synth_seed_opt->count() > 0) synth.seed = synth_seed;
      else if (synth.config_path.empty()) synth.seed = synth_seed;
      CmdSynth(synth, out);
    } else if (*analyze_cmd) {
      CmdAnalyze(analyze, out);
    } else if (*sweep_cmd) {
      sweep.train.early_stop_patience = patience(sweep_patience);
      CmdSweep(sweep, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace snap::cli
