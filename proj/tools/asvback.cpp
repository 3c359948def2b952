// tools/asvback.cpp

// Copyright 2026  The asvback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asvback/asvback.hpp"

namespace fs = std::filesystem;
using namespace asvback;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

void log(const std::string& cmd, const std::string& msg) {
  std::cerr << "asvback " << cmd << ": " << msg << '\n';
}

EmbeddingStore read_merged(const std::vector<std::string>& paths) {
  EmbeddingStore store;
  for (const auto& p : paths) {
    auto s = read_embeddings(p);
    if (store.dim() != 0 && s.dim() != store.dim())
      throw DataError(p + ": dimension " + std::to_string(s.dim()) + " does not match " +
                      std::to_string(store.dim()));
    try {
      store.merge(s);
    } catch (const DataError& e) {
      throw DataError(p + ": " + e.what());
    }
  }
  return store;
}

std::vector<ScoreFile> read_score_sets(const std::vector<std::string>& paths) {
  std::vector<ScoreFile> out;
  for (const auto& p : paths) out.push_back(read_scores(p));
  return out;
}

// --- formats shown in --help ------------------------------------------------

const char* kEmbeddingsHelp =
    "Embedding file (TAB between id and vector, spaces inside the vector):\n"
    "  dim\t3\n"
    "  utt1\t0.1 -0.2 0.3\n"
    "  utt2\t0.5 0.5 0\n";
const char* kEnrollMapHelp =
    "Enrollment map:\n"
    "  spk1\tutt1,utt2\n"
    "  spk2\tutt7\n"
    "  spk3\tutt8,utt9,utt10\n";
const char* kTrialsHelp =
    "Trial list (label column optional, but all-or-none):\n"
    "  spk1\tutt3\ttarget\n"
    "  spk2\tutt3\tnontarget\n"
    "  spk1\tutt4\tnontarget\n";
const char* kScoresHelp =
    "Score file:\n"
    "  spk1\tutt3\t0.8125\n"
    "  spk2\tutt3\t-0.0625\n"
    "  spk1\tutt4\t0.125\n";
const char* kStatsHelp =
    "Cohort stats file (id, mean, std of the top-K cohort scores):\n"
    "  spk1\t0.21\t0.04\n"
    "  utt3\t0.18\t0.05\n"
    "  utt4\t0.25\t0.03\n";
const char* kTasParamsHelp =
    "TAS-Norm parameter file:\n"
    "  w_mean\t0.3\n"
    "  b_mean\t-1.2\n"
    "  w_std\t0.8\n"
    "  b_std\t-2.5\n";
const char* kQualityHelp =
    "Quality table (e.g. VAD speech duration in seconds):\n"
    "  name\tvad1\n"
    "  utt1\t1.42\n"
    "  utt2\t0\n";
const char* kQmfHelp =
    "QMF matrix:\n"
    "  features\tenroll.l1 enroll.l2 test.l1\n"
    "  spk1\tutt3\t9.1 1 8.7\n"
    "  spk2\tutt3\t9.4 1 8.7\n";
const char* kFusionHelp =
    "Fusion model file (weights in original units; shift/scale are the\n"
    "standardization used while fitting):\n"
    "  bias\t-3.1\n"
    "  x.1\t12.5\n"
    "  y.test.l2\t0.7\n";
const char* kPlanHelp =
    "Plan file (overrides defaults; noise.<class> is '<lo_db> <hi_db> <enabled>'):\n"
    "  reverb_prob\t0.5\n"
    "  clip_prob\t0.25\n"
    "  noise.music\t5 15 0\n";
const char* kSynthHelp =
    "Config file (or one of the names clean, noisy, shifted):\n"
    "  n_speakers\t50\n"
    "  within_spread\t0.2\n"
    "  test_bias_norm\t0.6\n";

std::string footer(std::initializer_list<const char*> parts) {
  std::string s;
  for (const char* p : parts) {
    if (!s.empty()) s += '\n';
    s += p;
  }
  return s;
}

// --- subcommands --------------------------------------------------------------

struct ScoreArgs {
  std::vector<std::string> embeddings;
  std::string enroll_map, trials, durations, out;
};

void run_score(const ScoreArgs& a) {
  const auto store = read_merged(a.embeddings);
  const auto map = read_enroll_map(a.enroll_map);
  const auto trials = read_trials(a.trials);
  std::optional<QualityTable> durations;
  if (!a.durations.empty()) durations = read_quality_table(a.durations);
  const auto protos = build_prototypes(store, map, durations ? &*durations : nullptr);
  const auto scores = score_trials(store, protos, trials);
  write_scores(a.out, scores);
  log("score", "wrote " + std::to_string(scores.size()) + " scores to " + a.out);
}

struct CohortArgs {
  std::vector<std::string> embeddings;
  std::string cohort, cohort_map, enroll_map, durations, out;
  std::size_t top_k = kDefaultTopK;
};

void run_cohort(const CohortArgs& a) {
  const auto store = read_merged(a.embeddings);
  auto cohort = read_embeddings(a.cohort);
  if (!a.cohort_map.empty()) cohort = speaker_average(cohort, read_enroll_map(a.cohort_map));
  CohortStatsTable stats;
  if (!a.enroll_map.empty()) {
    std::optional<QualityTable> durations;
    if (!a.durations.empty()) durations = read_quality_table(a.durations);
    const auto protos = build_prototypes(store, read_enroll_map(a.enroll_map),
                                         durations ? &*durations : nullptr);
    stats = cohort_stats_table(protos, cohort, a.top_k);
  } else {
    stats = cohort_stats_table(store, cohort, a.top_k);
  }
  write_cohort_stats(a.out, stats);
  log("cohort", "wrote stats for " + std::to_string(stats.size()) + " ids (top " +
                    std::to_string(a.top_k) + " of " + std::to_string(cohort.size()) + ")");
}

struct NormArgs {
  std::string scores, enroll_stats, test_stats, params, out;
};

void run_norm(const NormArgs& a, bool trainable) {
  const auto scores = read_scores(a.scores);
  const auto es = read_cohort_stats(a.enroll_stats);
  const auto ts = read_cohort_stats(a.test_stats);
  std::optional<TasNormParams> params;
  if (trainable) params = tas_params_from_model(read_model(a.params));
  ScoreFile out;
  out.entries.reserve(scores.size());
  for (const auto& s : scores.entries) {
    const auto& e = es.at(s.enroll_id);
    const auto& t = ts.at(s.test_id);
    out.entries.push_back(
        {s.enroll_id, s.test_id, params ? tas_norm(s.score, e, t, *params) : as_norm(s.score, e, t)});
  }
  write_scores(a.out, out);
  log(trainable ? "tasnorm-apply" : "asnorm", "wrote " + std::to_string(out.size()) + " scores");
}

struct TrainArgs {
  std::string scores, trials, enroll_stats, test_stats, out;
  TasNormTrainConfig config;
};

void run_tas_train(const TrainArgs& a) {
  const auto trials = make_tas_trials(read_scores(a.scores), read_trials(a.trials),
                                      read_cohort_stats(a.enroll_stats), read_cohort_stats(a.test_stats));
  const auto r = tas_norm_train(trials, a.config);
  write_model(a.out, to_model(r.params));
  log("tasnorm-train", "nll " + format_double(r.initial_nll) + " -> " + format_double(r.final_nll) +
                           " (step " + std::to_string(r.best_step) + ")");
}

struct QmfArgs {
  std::vector<std::string> embeddings, quality_tables;
  std::string trials, enroll_map, enroll_stats, test_stats, params, durations, out;
};

void run_qmf(const QmfArgs& a) {
  const auto store = read_merged(a.embeddings);
  const auto trials = read_trials(a.trials);
  std::optional<QualityTable> durations;
  if (!a.durations.empty()) durations = read_quality_table(a.durations);
  const auto protos = build_prototypes(store, read_enroll_map(a.enroll_map), durations ? &*durations : nullptr);
  const auto es = read_cohort_stats(a.enroll_stats);
  const auto ts = read_cohort_stats(a.test_stats);
  QmfContext ctx{&store, &protos, &es, &ts, std::nullopt, {}};
  if (!a.params.empty()) ctx.tas_params = tas_params_from_model(read_model(a.params));
  for (const auto& spec : a.quality_tables) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw DataError("--quality-table expects name=path, got '" + spec + "'");
    auto table = read_quality_table(spec.substr(eq + 1));
    QualityTable renamed(spec.substr(0, eq));
    for (const auto& [id, v] : table.entries()) renamed.add(id, v);
    ctx.quality_tables.push_back(std::move(renamed));
  }
  const auto m = extract_qmf_matrix(trials, ctx);
  write_qmf_matrix(a.out, m);
  log("qmf", "wrote " + std::to_string(m.names.size()) + " features for " + std::to_string(m.rows.size()) + " trials");
}

struct FuseFitArgs {
  std::vector<std::string> scores;
  std::string qmf, trials, out;
  FusionFitOptions opts;
};

void run_fuse_fit(const FuseFitArgs& a) {
  const auto sets = read_score_sets(a.scores);
  const auto trials = read_trials(a.trials);
  const auto labels = aligned_labels(sets.front(), trials);
  std::optional<QmfMatrix> qmf;
  if (!a.qmf.empty()) qmf = read_qmf_matrix(a.qmf);
  const auto model = fit_fusion(sets, qmf ? &*qmf : nullptr, labels, a.opts);
  write_model(a.out, to_model(model));
  for (const auto& c : model.systems)
    if (c.dropped) log("fuse-fit", "warning: dropped constant column " + c.name);
  for (const auto& c : model.qmfs)
    if (c.dropped) log("fuse-fit", "warning: dropped constant feature " + c.name);
  log("fuse-fit", "wrote model to " + a.out);
}

struct FuseApplyArgs {
  std::vector<std::string> scores;
  std::string qmf, model, out;
};

void run_fuse_apply(const FuseApplyArgs& a) {
  const auto sets = read_score_sets(a.scores);
  std::optional<QmfMatrix> qmf;
  if (!a.qmf.empty()) qmf = read_qmf_matrix(a.qmf);
  const auto fused = fuse(sets, qmf ? &*qmf : nullptr, fusion_from_model(read_model(a.model)));
  write_scores(a.out, fused);
  log("fuse-apply", "wrote " + std::to_string(fused.size()) + " scores");
}

struct EvalArgs {
  std::string scores, trials, metrics = "eer,dcf_day,dcf_night,dcf_c", out;
  bool no_normalize = false;
};

void run_eval(const EvalArgs& a) {
  for (auto name : detail::split(a.metrics, ','))
    if (name != "eer" && name != "dcf_day" && name != "dcf_night" && name != "dcf_c")
      throw CLI::ValidationError("--metrics", "unknown metric '" + std::string(name) + "'");
  const auto scores = read_scores(a.scores);
  const auto labels = aligned_labels(scores, read_trials(a.trials));
  const auto s = scores.scores();
  const bool norm = !a.no_normalize;
  std::ostringstream os;
  for (auto name : detail::split(a.metrics, ',')) {
    OperatingPoint p;
    if (name == "eer") p = eer(s, labels);
    else if (name == "dcf_day") p = min_dcf(s, labels, kDayDcf, norm);
    else if (name == "dcf_night") p = min_dcf(s, labels, kNightDcf, norm);
    else p = {dcf_c(s, labels, norm), std::numeric_limits<double>::quiet_NaN()};
    os << name << '\t' << format_double(p.value) << '\t' << format_double(p.threshold) << '\n';
  }
  if (a.out.empty()) {
    std::cout << os.str();
  } else {
    auto f = detail::open_out(a.out);
    f << os.str();
    detail::finish(f, a.out);
  }
}

struct AugmentArgs {
  std::string in, out, plan, noise_dir, rir_dir;
  std::uint64_t seed = 0;
};

std::vector<fs::path> wav_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void run_augment(const AugmentArgs& a) {
  AugmentPlan plan = a.plan.empty() ? default_plan() : read_plan(a.plan);
  AugmentSources sources;
  if (!a.noise_dir.empty()) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(a.noise_dir))
      if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      auto& v = sources.noise[d.filename().string()];
      for (const auto& f : wav_files(d)) v.push_back(read_wav(f.string()));
    }
  }
  if (!a.rir_dir.empty())
    for (const auto& f : wav_files(a.rir_dir)) sources.rirs.push_back(read_wav(f.string()));

  fs::create_directories(a.out);
  const auto inputs = wav_files(a.in);
  for (const auto& path : inputs) {
    const auto name = path.filename().string();
    plan.seed = a.seed ^ stable_hash(name);
    const auto r = apply_plan(read_wav(path.string()), plan, sources);
    Rng dither(plan.seed ^ 0x9e3779b97f4a7c15ULL);
    const auto out_path = fs::path(a.out) / name;
    write_wav(out_path.string(), r.audio, &dither);
    auto meta = detail::open_out((fs::path(a.out) / (path.stem().string() + ".meta.tsv")).string());
    meta << "file\t" << name << '\n';
    for (const auto& [k, v] : r.metadata) meta << k << '\t' << v << '\n';
    detail::finish(meta, out_path.string() + " metadata");
  }
  log("augment", "processed " + std::to_string(inputs.size()) + " files");
}

struct SynthArgs {
  std::string config, out_dir;
};

void run_synth(const SynthArgs& a) {
  const bool named = a.config == "clean" || a.config == "noisy" || a.config == "shifted";
  const auto cfg = named ? named_config(a.config) : read_synth_config(a.config);
  const auto data = generate(cfg);
  write_synth(a.out_dir, data);
  log("synth", "wrote " + std::to_string(data.trials.size()) + " trials to " + a.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker-verification scoring, normalization, calibration and evaluation back-end"};
  app.require_subcommand(1);

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Cosine-score trials against speaker prototypes");
  c_score->add_option("--embeddings", score.embeddings, "Embedding file(s) with enrollment and test utterances")->required();
  c_score->add_option("--enroll-map", score.enroll_map, "Speaker to enrollment utterances")->required();
  c_score->add_option("--trials", score.trials, "Trial list")->required();
  c_score->add_option("--durations", score.durations, "Duration table for duration-weighted prototypes");
  c_score->add_option("--out", score.out, "Output score file")->required();
  c_score->footer(footer({kEmbeddingsHelp, kEnrollMapHelp, kTrialsHelp, kScoresHelp}));

  CohortArgs cohort;
  auto* c_cohort = app.add_subcommand("cohort", "Top-K cohort mean/std for every embedding or speaker");
  c_cohort->add_option("--embeddings", cohort.embeddings, "Embedding file(s)")->required();
  c_cohort->add_option("--cohort", cohort.cohort, "Cohort embeddings")->required();
  c_cohort->add_option("--cohort-map", cohort.cohort_map, "Average cohort utterances per speaker using this map");
  c_cohort->add_option("--top-k", cohort.top_k, "Number of highest cohort scores")->default_val(kDefaultTopK);
  c_cohort->add_option("--enroll-map", cohort.enroll_map, "Compute stats for speaker prototypes instead");
  c_cohort->add_option("--durations", cohort.durations, "Duration table for prototypes");
  c_cohort->add_option("--out", cohort.out, "Output cohort stats file")->required();
  c_cohort->footer(footer({kEmbeddingsHelp, kStatsHelp}));

  NormArgs asn;
  auto* c_asnorm = app.add_subcommand("asnorm", "Adaptive score normalization");
  c_asnorm->add_option("--scores", asn.scores, "Raw scores")->required();
  c_asnorm->add_option("--enroll-stats", asn.enroll_stats, "Cohort stats keyed by enrollment speaker")->required();
  c_asnorm->add_option("--test-stats", asn.test_stats, "Cohort stats keyed by test utterance")->required();
  c_asnorm->add_option("--out", asn.out, "Output score file")->required();
  c_asnorm->footer(footer({kScoresHelp, kStatsHelp}));

  NormArgs tas;
  auto* c_tas = app.add_subcommand("tasnorm-apply", "Trainable adaptive score normalization");
  c_tas->add_option("--scores", tas.scores, "Raw scores")->required();
  c_tas->add_option("--enroll-stats", tas.enroll_stats, "Cohort stats keyed by enrollment speaker")->required();
  c_tas->add_option("--test-stats", tas.test_stats, "Cohort stats keyed by test utterance")->required();
  c_tas->add_option("--params", tas.params, "TAS-Norm parameter file")->required();
  c_tas->add_option("--out", tas.out, "Output score file")->required();
  c_tas->footer(footer({kScoresHelp, kStatsHelp, kTasParamsHelp}));

  TrainArgs train;
  auto* c_train = app.add_subcommand("tasnorm-train", "Fit the four TAS-Norm scalars on labeled trials");
  c_train->add_option("--scores", train.scores, "Raw scores")->required();
  c_train->add_option("--trials", train.trials, "Labeled trial list aligned with the scores")->required();
  c_train->add_option("--enroll-stats", train.enroll_stats, "Cohort stats keyed by enrollment speaker")->required();
  c_train->add_option("--test-stats", train.test_stats, "Cohort stats keyed by test utterance")->required();
  c_train->add_option("--batch", train.config.batch_size, "Mini-batch size")->default_val(256);
  c_train->add_option("--steps", train.config.steps, "Gradient steps")->default_val(2000);
  c_train->add_option("--lr", train.config.learning_rate, "Learning rate")->default_val(1e-2);
  c_train->add_option("--seed", train.config.seed, "Batch sampling seed")->default_val(0);
  c_train->add_option("--eval-every", train.config.eval_every,
                      "Keep the best whole-set NLL iterate, checked every N steps (0: last iterate)")
      ->default_val(50);
  c_train->add_option("--out", train.out, "Output parameter file")->required();
  c_train->footer(footer({kTrialsHelp, kStatsHelp, kTasParamsHelp}));

  QmfArgs qmf;
  auto* c_qmf = app.add_subcommand("qmf", "Extract quality measures per trial");
  c_qmf->add_option("--trials", qmf.trials, "Trial list")->required();
  c_qmf->add_option("--embeddings", qmf.embeddings, "Embedding file(s)")->required();
  c_qmf->add_option("--enroll-map", qmf.enroll_map, "Speaker to enrollment utterances")->required();
  c_qmf->add_option("--enroll-stats", qmf.enroll_stats, "AS-Norm cohort stats of the enrollment speakers")->required();
  c_qmf->add_option("--test-stats", qmf.test_stats, "AS-Norm cohort stats of the test utterances")->required();
  c_qmf->add_option("--params", qmf.params, "TAS-Norm parameters; adds the calibrated mean/std features");
  c_qmf->add_option("--durations", qmf.durations, "Duration table for prototypes");
  c_qmf->add_option("--quality-table", qmf.quality_tables, "Per-utterance table as name=path (repeatable)");
  c_qmf->add_option("--out", qmf.out, "Output QMF matrix")->required();
  c_qmf->footer(footer({kQualityHelp, kQmfHelp}));

  FuseFitArgs ffit;
  auto* c_ffit = app.add_subcommand("fuse-fit", "Fit fusion weights by logistic regression");
  c_ffit->add_option("--scores", ffit.scores, "Score file per system (repeatable, aligned)")->required();
  c_ffit->add_option("--qmf", ffit.qmf, "QMF matrix aligned with the scores");
  c_ffit->add_option("--trials", ffit.trials, "Labeled trial list")->required();
  c_ffit->add_option("--lr", ffit.opts.learning_rate, "Learning rate")->default_val(0.1);
  c_ffit->add_option("--iterations", ffit.opts.iterations, "Full-batch iterations")->default_val(5000);
  c_ffit->add_option("--l2", ffit.opts.l2, "L2 penalty on standardized weights")->default_val(0.0);
  c_ffit->add_option("--out", ffit.out, "Output fusion model")->required();
  c_ffit->footer(footer({kScoresHelp, kQmfHelp, kFusionHelp}));

  FuseApplyArgs fapply;
  auto* c_fapply = app.add_subcommand("fuse-apply", "Apply a fusion model");
  c_fapply->add_option("--model", fapply.model, "Fusion model")->required();
  c_fapply->add_option("--scores", fapply.scores, "Score file per system (repeatable, aligned)")->required();
  c_fapply->add_option("--qmf", fapply.qmf, "QMF matrix aligned with the scores");
  c_fapply->add_option("--out", fapply.out, "Output score file")->required();
  c_fapply->footer(footer({kFusionHelp, kScoresHelp, kQmfHelp}));

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "EER and minimum detection costs");
  c_eval->add_option("--scores", ev.scores, "Score file")->required();
  c_eval->add_option("--trials", ev.trials, "Labeled trial list aligned with the scores")->required();
  c_eval->add_option("--metrics", ev.metrics, "Comma-separated subset of eer,dcf_day,dcf_night,dcf_c")
      ->default_val(ev.metrics);
  c_eval->add_flag("--no-normalize", ev.no_normalize, "Report raw rather than normalized DCFs");
  c_eval->add_option("--out", ev.out, "Write the report here instead of stdout");
  c_eval->footer(footer({kScoresHelp, kTrialsHelp,
                         "Output (metric, value, threshold):\n  eer\t0.045\t0.31\n  dcf_day\t0.21\t0.27\n  dcf_c\t0.43\tnan\n"}));

  AugmentArgs aug;
  auto* c_aug = app.add_subcommand("augment", "Corrupt 16 kHz mono WAV files");
  c_aug->add_option("--in", aug.in, "Input directory of .wav files")->required();
  c_aug->add_option("--out", aug.out, "Output directory")->required();
  c_aug->add_option("--plan", aug.plan, "Plan file (defaults apply when omitted)");
  c_aug->add_option("--noise-dir", aug.noise_dir, "Directory with one subdirectory of .wav files per noise class");
  c_aug->add_option("--rir-dir", aug.rir_dir, "Directory of RIR .wav files");
  c_aug->add_option("--seed", aug.seed, "Base seed; each file uses seed XOR hash(file name)")->default_val(0);
  c_aug->footer(footer({kPlanHelp,
                        "Metadata written next to each output as <stem>.meta.tsv:\n  file\ta.wav\n  reverb\t1\n  snr_db\t14.2\n"}));

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic embedding population");
  c_syn->add_option("--config", syn.config, "clean, noisy, shifted, or a config file")->required();
  c_syn->add_option("--out-dir", syn.out_dir, "Output directory")->required();
  c_syn->footer(footer({kSynthHelp}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (*c_score) run_score(score);
    else if (*c_cohort) run_cohort(cohort);
    else if (*c_asnorm) run_norm(asn, false);
    else if (*c_tas) run_norm(tas, true);
    else if (*c_train) run_tas_train(train);
    else if (*c_qmf) run_qmf(qmf);
    else if (*c_ffit) run_fuse_fit(ffit);
    else if (*c_fapply) run_fuse_apply(fapply);
    else if (*c_eval) run_eval(ev);
    else if (*c_aug) run_augment(aug);
    else if (*c_syn) run_synth(syn);
  } catch (const CLI::ValidationError& e) {
    log(cmd, std::string("usage error: ") + e.what());
    return kUsage;
  } catch (const NumericError& e) {
    log(cmd, std::string("error: ") + e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    log(cmd, std::string("error: ") + e.what());
    return kData;
  }
  return kOk;
}
