// Copyright 2026 The Corefens Authors.
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

#include "corefens/cli.h"

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "corefens/checkpoint.h"
#include "corefens/corpus.h"
#include "corefens/ensemble.h"
#include "corefens/errors.h"
#include "corefens/metrics.h"
#include "corefens/training.h"
#include "corefens/wiki.h"

namespace corefens {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  uint64_t seed = 1;
  std::string out;
  std::string log_level = "info";
  int jobs = 0;
};

struct SynthOptions {
  SyntheticConfig config;
  int train_docs = 20;
  int dev_docs = 5;
  int test_docs = 10;
};

struct WikiOptions {
  std::string input;
  std::string redirects;
  WikiCorpusSpec spec;
};

struct TrainOptions {
  std::string regime = "baseline";
  std::string train;
  std::string dev;
  std::string source;
  std::string embeddings;
  std::string prune = "top-lambda";
  double lambda = 0.18;
  bool large_encoder_rates = false;
  bool no_gold_mentions = false;
  ModelConfig model;
  TrainConfig config;
};

struct EvalOptions {
  std::vector<std::string> checkpoints;
  std::vector<std::string> scores;
  std::string test;
  std::string ensemble = "mean";
  std::string embeddings;
  std::string prune = "top-lambda";
  double lambda = 0.18;
  bool dump_scores = false;
  bool emit_singletons = false;
};

struct ScoreOptions {
  std::string gold;
  std::string pred;
  bool emit_singletons = false;
};

void SetUpLogging(const std::string &level) {
  auto logger = spdlog::get("corefens");
  if (!logger) {
    logger = spdlog::stderr_color_mt("corefens");
    logger->set_pattern("[%l] %v");
  }
  spdlog::set_default_logger(logger);
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") {
    throw ConfigError("unknown log level '" + level + "'");
  }
  spdlog::set_level(parsed);
}

fs::path OutputDir(const GlobalOptions &g) {
  if (g.out.empty()) throw ConfigError("--out is required");
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw DataError("cannot create " + g.out + ": " + ec.message());
  return fs::path(g.out);
}

// Global options plus those of the subcommand that ran, in a form that
// --config reads back.
void EchoConfig(const CLI::App &app, const fs::path &dir) {
  std::string command;
  for (const CLI::App *sub : app.get_subcommands()) command = sub->get_name();
  std::istringstream all(app.config_to_str(true, false));
  std::string out;
  for (std::string line; std::getline(all, line);) {
    const size_t eq = line.find('=');
    const size_t dot = line.find('.');
    if (dot < eq && line.compare(0, dot, command) != 0) continue;
    out += line;
    out += '\n';
  }
  WriteTextFile((dir / "effective_config.ini").string(), out);
}

void Write(const fs::path &dir, const char *name, std::string_view text) {
  WriteTextFile((dir / name).string(), text);
}

std::optional<PrecomputedEmbeddings> LoadEmbeddings(const std::string &path) {
  if (path.empty()) return std::nullopt;
  return PrecomputedEmbeddings::Load(path);
}

// ---------------------------------------------------------------------------

int RunSynth(const CLI::App &app, const GlobalOptions &g,
             const SynthOptions &o) {
  const fs::path dir = OutputDir(g);
  SyntheticSplits splits = GenerateSyntheticSplits(
      o.config, o.train_docs, o.dev_docs, o.test_docs, g.seed);
  Write(dir, "train.conll", EmitConll(splits.train));
  Write(dir, "dev.conll", EmitConll(splits.dev));
  Write(dir, "test.conll", EmitConll(splits.test));
  EchoConfig(app, dir);
  std::printf("wrote %zu/%zu/%zu documents to %s\n", splits.train.size(),
              splits.dev.size(), splits.test.size(), dir.string().c_str());
  return kExitOk;
}

int RunBuildWiki(const CLI::App &app, const GlobalOptions &g,
                 WikiOptions o) {
  const fs::path dir = OutputDir(g);
  o.spec.seed = g.seed;
  if (!o.redirects.empty()) o.spec.redirects = ReadRedirects(o.redirects);
  const WikiStats stats = StreamBuild(o.input, o.spec, dir.string());
  EchoConfig(app, dir);
  std::fputs(stats.ToTsv().c_str(), stdout);
  return kExitOk;
}

int RunTrain(const CLI::App &app, const GlobalOptions &g, TrainOptions o) {
  const RegimeKind kind = ParseRegime(o.regime);
  if ((kind != RegimeKind::kBaseline) && o.source.empty()) {
    throw ConfigError(RegimeName(kind) + " training requires --source");
  }
  const Corpus target = ReadConllFile(o.train, Split::kTrain);
  const Corpus dev = ReadConllFile(o.dev, Split::kDev);
  Corpus source;
  if (!o.source.empty()) source = ReadConllFile(o.source, Split::kTrain);

  const std::optional<PrecomputedEmbeddings> embeddings =
      LoadEmbeddings(o.embeddings);
  if (embeddings) {
    o.model.precomputed_embeddings = true;
    o.model.embed_dim = embeddings->dim();
  }
  o.config.seed = g.seed;
  o.config.prune = PruneStrategy::Parse(o.prune, o.lambda);
  o.config.gold_mentions_in_training = !o.no_gold_mentions;
  if (o.large_encoder_rates) {
    o.config.lower_lr = TrainConfig::kLargeEncoderLowerLr;
    o.config.upper_lr = TrainConfig::kLargeEncoderUpperLr;
  }
  const fs::path dir = OutputDir(g);
  EchoConfig(app, dir);

  Regime regime;
  regime.kind = kind;
  regime.target = &target;
  regime.source = o.source.empty() ? nullptr : &source;
  const TrainResult result = Train(regime, dev, o.model, o.config,
                                   embeddings ? &*embeddings : nullptr);
  SaveCheckpoint(result.params, (dir / "model.ckpt").string());
  Write(dir, "train_log.tsv", result.Log());
  std::printf("best epoch %d, dev AVG %.4f\n", result.best_epoch,
              result.best_dev_avg);
  return kExitOk;
}

int RunEvaluate(const CLI::App &app, const GlobalOptions &g,
                const EvalOptions &o) {
  if (o.checkpoints.empty() && o.scores.empty()) {
    throw ConfigError("evaluate needs at least one --checkpoint or --scores");
  }
  Combine combine;
  if (o.ensemble == "mean") {
    combine = Combine::kMean;
  } else if (o.ensemble == "oracle") {
    combine = Combine::kOracle;
  } else {
    throw ConfigError("--ensemble must be mean or oracle");
  }
  const Corpus test = ReadConllFile(o.test, Split::kTest);
  const std::optional<PrecomputedEmbeddings> embeddings =
      LoadEmbeddings(o.embeddings);
  const PrecomputedEmbeddings *pre = embeddings ? &*embeddings : nullptr;

  std::vector<ModelParams> models;
  for (const std::string &path : o.checkpoints) {
    models.push_back(LoadCheckpoint(path));
    const ModelConfig &c = models.back().config();
    if (c.max_span_width != models.front().config().max_span_width) {
      throw DataError(fmt::format(
          "incompatible checkpoints: {} uses span limit {}, {} uses {}",
          o.checkpoints.front(), models.front().config().max_span_width, path,
          c.max_span_width));
    }
    if (c.precomputed_embeddings && pre == nullptr) {
      throw ConfigError(path + " expects precomputed embeddings (--embeddings)");
    }
  }
  const PruneStrategy prune = PruneStrategy::Parse(o.prune, o.lambda);
  const fs::path dir = OutputDir(g);
  EchoConfig(app, dir);

  std::map<std::string, Clustering> predictions;
  if (models.size() == 1 && o.scores.empty() && combine == Combine::kMean &&
      !o.dump_scores) {
    predictions =
        PredictCorpus(test, models.front(), {prune, o.emit_singletons}, pre);
  } else {
    std::vector<std::unique_ptr<ScoreSource>> owned;
    for (const ModelParams &m : models) {
      owned.push_back(std::make_unique<ModelSource>(m, pre));
    }
    for (const std::string &path : o.scores) {
      owned.push_back(std::make_unique<ScoreDump>(ScoreDump::Load(path)));
    }
    std::vector<const ScoreSource *> sources;
    for (const auto &s : owned) sources.push_back(s.get());
    EnsembleOptions options;
    options.prune = prune;
    options.combine = combine;
    options.emit_singletons = o.emit_singletons;
    options.dump_scores = o.dump_scores;
    EnsembleCorpusResult result = EnsembleCorpus(test, sources, options);
    for (size_t k = 0; k < result.dumps.size(); ++k) {
      WriteTextFile((dir / fmt::format("scores_{}.tsv", k)).string(),
                    result.dumps[k]);
    }
    predictions = std::move(result.predictions);
  }

  const MetricReport report =
      ScoreCorpus(test, predictions, o.emit_singletons);
  Write(dir, "predicted.conll", PredictionsToConll(test, predictions));
  Write(dir, "clusters.tsv", PredictionsToTable(test, predictions));
  Write(dir, "report.txt", report.ToTable());
  Write(dir, "metrics.txt", report.ToKeyValue());
  std::fputs(report.ToTable().c_str(), stdout);
  return kExitOk;
}

int RunScore(const CLI::App &app, const GlobalOptions &g,
             const ScoreOptions &o) {
  const Corpus gold = ReadConllFile(o.gold, Split::kTest);
  const Corpus pred = ReadConllFile(o.pred, Split::kTest);
  std::map<std::string, Clustering> predictions;
  for (const Document &doc : pred.documents) {
    const Document *match = gold.Find(doc.id);
    if (match == nullptr) {
      throw DataError("predicted document " + doc.id + " is not in the gold file");
    }
    if (match->size() != doc.size()) {
      throw DataError(fmt::format(
          "document {} has {} gold tokens but {} predicted tokens", doc.id,
          match->size(), doc.size()));
    }
    predictions[doc.id] = doc.gold_clusters;
  }
  const MetricReport report =
      ScoreCorpus(gold, predictions, o.emit_singletons);
  if (!g.out.empty()) {
    const fs::path dir = OutputDir(g);
    Write(dir, "report.txt", report.ToTable());
    Write(dir, "metrics.txt", report.ToKeyValue());
    EchoConfig(app, dir);
  }
  std::fputs(report.ToTable().c_str(), stdout);
  return kExitOk;
}

void AddModelFlags(CLI::App *cmd, ModelConfig &m) {
  cmd->add_option("--embed-dim", m.embed_dim, "Token embedding size")
      ->capture_default_str();
  cmd->add_option("--context-window", m.context_window,
                  "Neighbors averaged on each side")
      ->capture_default_str();
  cmd->add_option("--hash-buckets", m.hash_buckets, "Embedding hash buckets")
      ->capture_default_str();
  cmd->add_option("--width-dim", m.width_dim, "Span width feature size")
      ->capture_default_str();
  cmd->add_option("--distance-dim", m.distance_dim, "Distance feature size")
      ->capture_default_str();
  cmd->add_option("--hidden-dim", m.hidden_dim, "Scorer hidden width")
      ->capture_default_str();
  cmd->add_option("--hidden-layers", m.hidden_layers, "Scorer hidden layers")
      ->capture_default_str();
  cmd->add_option("--max-span-width", m.max_span_width,
                  "Longest candidate span (L)")
      ->capture_default_str();
}

}  // namespace

int RunMain(int argc, const char *const *argv) {
  CLI::App app{"Multilingual coreference resolution toolkit", "corefens"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Key-value config file (INI/TOML)");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for all randomness")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--log-level", g.log_level,
                 "trace, debug, info, warn, error or off")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads (0: all cores)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  SynthOptions synth;
  CLI::App *synth_cmd =
      app.add_subcommand("synth-gen", "Generate synthetic train/dev/test corpora");
  synth_cmd->add_option("--train-docs", synth.train_docs)->capture_default_str();
  synth_cmd->add_option("--dev-docs", synth.dev_docs)->capture_default_str();
  synth_cmd->add_option("--test-docs", synth.test_docs)->capture_default_str();
  synth_cmd->add_option("--doc-len", synth.config.doc_len)->capture_default_str();
  synth_cmd->add_option("--entities", synth.config.num_entities)
      ->capture_default_str();
  synth_cmd->add_option("--mentions-per-entity",
                        synth.config.mentions_per_entity)
      ->capture_default_str();
  synth_cmd->add_option("--vocab-size", synth.config.vocab_size)
      ->capture_default_str();
  synth_cmd->add_option("--name-pool", synth.config.name_pool)
      ->capture_default_str();
  synth_cmd->add_option("--singleton-fraction", synth.config.singleton_fraction)
      ->capture_default_str();
  synth_cmd->add_option("--filler-prefix", synth.config.filler_prefix)
      ->capture_default_str();
  synth_cmd->add_option("--id-prefix", synth.config.id_prefix)
      ->capture_default_str();
  synth_cmd->add_option("--language", synth.config.language)
      ->capture_default_str();

  WikiOptions wiki;
  CLI::App *wiki_cmd = app.add_subcommand(
      "build-wiki", "Build a coreference corpus from Wikipedia anchors");
  wiki_cmd->add_option("--input", wiki.input,
                       "Record file (title<TAB>text) or directory of wikitext")
      ->required();
  wiki_cmd->add_option("--dev-docs", wiki.spec.dev_docs)->capture_default_str();
  wiki_cmd->add_option("--test-docs", wiki.spec.test_docs)->capture_default_str();
  wiki_cmd->add_option("--min-nonsingleton-clusters",
                       wiki.spec.min_nonsingleton_clusters)
      ->capture_default_str();
  wiki_cmd->add_option("--max-skip-rate", wiki.spec.max_skip_rate)
      ->capture_default_str();
  wiki_cmd->add_option("--redirects", wiki.redirects, "from<TAB>to map");
  wiki_cmd->add_option("--language", wiki.spec.language)->capture_default_str();

  TrainOptions train;
  CLI::App *train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--regime", train.regime,
                        "baseline, continued, joint or wiki-pretrain")
      ->capture_default_str();
  train_cmd->add_option("--train", train.train, "Target training CoNLL")
      ->required();
  train_cmd->add_option("--dev", train.dev, "Target dev CoNLL")->required();
  train_cmd->add_option("--source", train.source,
                        "Source-language or Wikipedia training CoNLL");
  train_cmd->add_option("--embeddings", train.embeddings,
                        "Precomputed token vectors");
  train_cmd->add_option("--epochs", train.config.epochs)->capture_default_str();
  train_cmd->add_option("--pretrain-epochs", train.config.pretrain_epochs)
      ->capture_default_str();
  train_cmd->add_option("--finetune-epochs", train.config.finetune_epochs)
      ->capture_default_str();
  train_cmd->add_option("--lower-lr", train.config.lower_lr,
                        "Encoder learning rate")
      ->capture_default_str();
  train_cmd->add_option("--upper-lr", train.config.upper_lr,
                        "Scorer learning rate")
      ->capture_default_str();
  train_cmd->add_flag("--large-encoder-rates", train.large_encoder_rates,
                      "Use the 1e-5/1e-4 rates tuned for large encoders");
  train_cmd->add_option("--clip-norm", train.config.clip_norm,
                        "Global gradient-norm clip (0 disables)")
      ->capture_default_str();
  train_cmd->add_option("--init-scale", train.config.init_scale)
      ->capture_default_str();
  train_cmd->add_flag("--no-gold-mentions", train.no_gold_mentions,
                      "Train on the pruned spans only");
  train_cmd->add_flag("--emit-singletons", train.config.emit_singletons,
                      "Keep singletons when scoring dev");
  train_cmd->add_option("--prune", train.prune, "top-lambda or positive")
      ->capture_default_str();
  train_cmd->add_option("--lambda", train.lambda)->capture_default_str();
  AddModelFlags(train_cmd, train.model);

  EvalOptions eval;
  CLI::App *eval_cmd = app.add_subcommand(
      "evaluate", "Predict and score with one model or an ensemble");
  eval_cmd->add_option("--checkpoint", eval.checkpoints, "Model checkpoint");
  eval_cmd->add_option("--scores", eval.scores, "Score dump from --dump-scores");
  eval_cmd->add_option("--test", eval.test, "Gold test CoNLL")->required();
  eval_cmd->add_option("--ensemble", eval.ensemble, "mean or oracle")
      ->capture_default_str();
  eval_cmd->add_option("--embeddings", eval.embeddings,
                       "Precomputed token vectors");
  eval_cmd->add_option("--prune", eval.prune, "top-lambda or positive")
      ->capture_default_str();
  eval_cmd->add_option("--lambda", eval.lambda)->capture_default_str();
  eval_cmd->add_flag("--dump-scores", eval.dump_scores,
                     "Write per-model scores to scores_<k>.tsv");
  eval_cmd->add_flag("--emit-singletons", eval.emit_singletons);

  ScoreOptions score;
  CLI::App *score_cmd =
      app.add_subcommand("score", "Score a predicted CoNLL file against gold");
  score_cmd->add_option("gold,--gold", score.gold, "Gold CoNLL")->required();
  score_cmd->add_option("pred,--pred", score.pred, "Predicted CoNLL")
      ->required();
  score_cmd->add_flag("--emit-singletons", score.emit_singletons);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    SetUpLogging(g.log_level);
    if (g.jobs > 0) omp_set_num_threads(g.jobs);
    if (synth_cmd->parsed()) return RunSynth(app, g, synth);
    if (wiki_cmd->parsed()) return RunBuildWiki(app, g, wiki);
    if (train_cmd->parsed()) return RunTrain(app, g, train);
    if (eval_cmd->parsed()) return RunEvaluate(app, g, eval);
    if (score_cmd->parsed()) return RunScore(app, g, score);
  } catch (const DataError &e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception &e) {
    spdlog::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}

int RunMain(const std::vector<std::string> &args) {
  std::vector<const char *> argv;
  for (const std::string &a : args) argv.push_back(a.c_str());
  return RunMain(static_cast<int>(argv.size()), argv.data());
}

}  // namespace corefens
