// tests/cli_test.cpp

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


#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "asvback/asvback.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace asvback;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  static int n = 0;
  static const auto dir = testutil::scratch_dir("cli_io_" + std::to_string(getpid()));
  const auto out = dir / ("out" + std::to_string(n));
  const auto err = dir / ("err" + std::to_string(n++));
  const std::string cmd =
      std::string(ASVBACK_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testutil::slurp(out), testutil::slurp(err)};
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const fs::path kClean = fs::path(ASVBACK_FIXTURE_DIR) / "clean";

std::string fx(const char* f) { return (kClean / f).string(); }

double eer_line(const std::string& report) {
  std::istringstream in(report);
  std::string name, value;
  while (in >> name >> value) {
    if (name == "eer") return std::stod(value);
    std::getline(in, name);
  }
  return -1;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("score --trials x").code, 2);
  EXPECT_EQ(run("eval --scores a --trials b --metrics eer,bogus").code, 2);
  const auto help = run("--help");
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("tasnorm-train"), std::string::npos);
}

TEST(Cli, DataErrorsExitThree) {
  const auto dir = testutil::scratch_dir("cli_data");
  EXPECT_EQ(run("eval --scores " + (dir / "missing").string() + " --trials " + fx("trials.tsv")).code, 3);

  write(dir / "trials.tsv", "spk0000\tspk0000-t0\ttarget\nspk0000\tghost-utt\tnontarget\n");
  const auto r = run("score --embeddings " + fx("enroll_embeddings.tsv") + " --embeddings " +
                     fx("test_embeddings.tsv") + " --enroll-map " + fx("enroll_map.tsv") + " --trials " +
                     (dir / "trials.tsv").string() + " --out " + (dir / "s.tsv").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("trial 2"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("ghost-utt"), std::string::npos) << r.err;

  write(dir / "bad.tsv", "dim\t2\nu1\t1 0 3\n");
  const auto b = run("cohort --embeddings " + (dir / "bad.tsv").string() + " --cohort " + fx("cohort_embeddings.tsv") +
                     " --out " + (dir / "c.tsv").string());
  EXPECT_EQ(b.code, 3);
  EXPECT_NE(b.err.find(":2:"), std::string::npos) << b.err;
}

TEST(Cli, NumericErrorsExitFour) {
  const auto dir = testutil::scratch_dir("cli_numeric");
  write(dir / "s.tsv", "a\tx\t0.5\nb\ty\t0.1\n");
  write(dir / "t.tsv", "a\tx\ttarget\nb\ty\ttarget\n");
  EXPECT_EQ(run("eval --scores " + (dir / "s.tsv").string() + " --trials " + (dir / "t.tsv").string()).code, 4);
  write(dir / "cohort.tsv", "dim\t2\nc1\t1 0\nc2\t0 1\n");
  write(dir / "emb.tsv", "dim\t2\nu1\t1 1\n");
  EXPECT_EQ(run("cohort --embeddings " + (dir / "emb.tsv").string() + " --cohort " + (dir / "cohort.tsv").string() +
                " --out " + (dir / "c.tsv").string())
                .code,
            4);
}

TEST(Cli, PipelineOnCleanFixtureIsIdempotentAndMatchesLibrary) {
  const auto dir = testutil::scratch_dir("cli_pipeline");
  auto p = [&](const char* f) { return (dir / f).string(); };
  // Runs `cmd --out <f>` twice and requires byte-identical outputs.
  auto step = [&](const std::string& cmd, const char* f) {
    const auto a = run(cmd + " --out " + p(f));
    const auto b = run(cmd + " --out " + p(f) + ".again");
    EXPECT_EQ(a.code, 0) << cmd << "\n" << a.err;
    EXPECT_EQ(b.code, 0) << cmd << "\n" << b.err;
    EXPECT_EQ(testutil::slurp(p(f)), testutil::slurp(p(f) + ".again")) << cmd;
  };
  const std::string embs = " --embeddings " + fx("enroll_embeddings.tsv") + " --embeddings " + fx("test_embeddings.tsv");
  step("score" + embs + " --enroll-map " + fx("enroll_map.tsv") + " --trials " + fx("trials.tsv") +
           " --durations " + fx("durations.tsv"),
       "raw.tsv");
  step("eval --scores " + p("raw.tsv") + " --trials " + fx("trials.tsv"), "eval.txt");
  const auto report = testutil::slurp(p("eval.txt"));
  EXPECT_GE(eer_line(report), 0.0);
  EXPECT_LT(eer_line(report), 0.01);
  EXPECT_NE(report.find("dcf_c\t"), std::string::npos);

  step("cohort --embeddings " + fx("test_embeddings.tsv") + " --cohort " + fx("cohort_embeddings.tsv"), "ts.tsv");
  step("cohort" + embs + " --cohort " + fx("cohort_embeddings.tsv") + " --enroll-map " + fx("enroll_map.tsv") +
           " --durations " + fx("durations.tsv"),
       "es.tsv");
  const std::string stats = " --enroll-stats " + p("es.tsv") + " --test-stats " + p("ts.tsv");
  step("asnorm --scores " + p("raw.tsv") + stats, "as.tsv");
  step("tasnorm-train --scores " + p("raw.tsv") + " --trials " + fx("trials.tsv") + stats + " --steps 100 --seed 3",
       "tas.model");
  step("tasnorm-apply --scores " + p("raw.tsv") + stats + " --params " + p("tas.model"), "tas.tsv");
  step("qmf --trials " + fx("trials.tsv") + embs + " --enroll-map " + fx("enroll_map.tsv") + stats + " --params " +
           p("tas.model") + " --durations " + fx("durations.tsv") + " --quality-table duration=" + fx("durations.tsv"),
       "qmf.tsv");
  step("fuse-fit --scores " + p("as.tsv") + " --scores " + p("tas.tsv") + " --qmf " + p("qmf.tsv") + " --trials " +
           fx("trials.tsv") + " --iterations 500",
       "fusion.model");
  step("fuse-apply --model " + p("fusion.model") + " --scores " + p("as.tsv") + " --scores " + p("tas.tsv") +
           " --qmf " + p("qmf.tsv"),
       "fused.tsv");
  const auto fe = run("eval --scores " + p("fused.tsv") + " --trials " + fx("trials.tsv") + " --metrics eer");
  ASSERT_EQ(fe.code, 0);
  EXPECT_LT(eer_line(fe.out), 0.01);

  // The same pipeline in process.
  auto store = read_embeddings(fx("enroll_embeddings.tsv"));
  store.merge(read_embeddings(fx("test_embeddings.tsv")));
  const auto test = read_embeddings(fx("test_embeddings.tsv"));
  const auto cohort = read_embeddings(fx("cohort_embeddings.tsv"));
  const auto trials = read_trials(fx("trials.tsv"));
  const auto durations = read_quality_table(fx("durations.tsv"));
  const auto protos = build_prototypes(store, read_enroll_map(fx("enroll_map.tsv")), &durations);
  const auto raw = score_trials(store, protos, trials);
  EXPECT_EQ(read_scores(p("raw.tsv")), raw);
  const auto es = cohort_stats_table(protos, cohort, kDefaultTopK);
  const auto ts = cohort_stats_table(test, cohort, kDefaultTopK);
  EXPECT_EQ(read_cohort_stats(p("es.tsv")), es);
  EXPECT_EQ(read_cohort_stats(p("ts.tsv")), ts);
  ScoreFile as = raw;
  for (auto& e : as.entries) e.score = as_norm(e.score, es.at(e.enroll_id), ts.at(e.test_id));
  EXPECT_EQ(read_scores(p("as.tsv")), as);
  TasNormTrainConfig cfg;
  cfg.steps = 100;
  cfg.seed = 3;
  const auto tas = tas_norm_train(make_tas_trials(raw, trials, es, ts), cfg).params;
  EXPECT_EQ(read_model(p("tas.model")), to_model(tas));
  ScoreFile tas_scores = raw;
  for (auto& e : tas_scores.entries) e.score = tas_norm(e.score, es.at(e.enroll_id), ts.at(e.test_id), tas);
  EXPECT_EQ(read_scores(p("tas.tsv")), tas_scores);
  QmfContext ctx{&store, &protos, &es, &ts, tas, {durations}};
  const auto qmf = extract_qmf_matrix(trials, ctx);
  EXPECT_EQ(read_qmf_matrix(p("qmf.tsv")), qmf);
  const std::vector<ScoreFile> systems{as, tas_scores};
  FusionFitOptions opts;
  opts.iterations = 500;
  const auto model = fit_fusion(systems, &qmf, aligned_labels(as, trials), opts);
  EXPECT_EQ(read_model(p("fusion.model")), to_model(model));
  EXPECT_EQ(read_scores(p("fused.tsv")), fuse(systems, &qmf, model));
}

TEST(Cli, IdentityFusionModelReproducesScores) {
  const auto dir = testutil::scratch_dir("cli_identity");
  write(dir / "s.tsv", "a\tx\t0.25\nb\ty\t-1.5\nc\tz\t1e-300\n");
  write(dir / "m.model", "bias\t0\nx.1\t1\nshift.x.1\t0\nscale.x.1\t1\n");
  ASSERT_EQ(run("fuse-apply --model " + (dir / "m.model").string() + " --scores " + (dir / "s.tsv").string() +
                " --out " + (dir / "o.tsv").string())
                .code,
            0);
  EXPECT_EQ(testutil::slurp(dir / "o.tsv"), testutil::slurp(dir / "s.tsv"));
}

TEST(Cli, SynthMatchesCommittedFixture) {
  const auto dir = testutil::scratch_dir("cli_synth");
  ASSERT_EQ(run("synth --config clean --out-dir " + dir.string()).code, 0);
  for (const char* f : kSynthFiles) EXPECT_EQ(testutil::slurp(dir / f), testutil::slurp(kClean / f)) << f;
  EXPECT_EQ(run("synth --config nope --out-dir " + dir.string()).code, 3);
}

TEST(Cli, AugmentIsReproducible) {
  const auto dir = testutil::scratch_dir("cli_augment");
  fs::create_directories(dir / "in");
  fs::create_directories(dir / "noise" / "babble");
  fs::create_directories(dir / "noise" / "noise");
  fs::create_directories(dir / "rir");
  Rng rng(1);
  auto wave = [&](std::size_t n, double scale) {
    Waveform w;
    for (std::size_t i = 0; i < n; ++i) w.samples.push_back(scale * rng.normal());
    return w;
  };
  for (int i = 0; i < 3; ++i) write_wav((dir / "in" / ("u" + std::to_string(i) + ".wav")).string(), wave(32000, 0.1));
  for (int i = 0; i < 7; ++i)
    write_wav((dir / "noise" / "babble" / ("b" + std::to_string(i) + ".wav")).string(), wave(40000, 0.05));
  write_wav((dir / "noise" / "noise" / "n.wav").string(), wave(40000, 0.1));
  Waveform rir{{0.2, 0.9, 0.3, 0.1}};
  write_wav((dir / "rir" / "r.wav").string(), rir);

  const std::string common = " --in " + (dir / "in").string() + " --noise-dir " + (dir / "noise").string() +
                             " --rir-dir " + (dir / "rir").string() + " --seed 7 --out ";
  const auto a = run("augment" + common + (dir / "a").string());
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(run("augment" + common + (dir / "b").string()).code, 0);
  for (int i = 0; i < 3; ++i) {
    const std::string stem = "u" + std::to_string(i);
    EXPECT_EQ(testutil::slurp(dir / "a" / (stem + ".wav")), testutil::slurp(dir / "b" / (stem + ".wav")));
    EXPECT_EQ(testutil::slurp(dir / "a" / (stem + ".meta.tsv")), testutil::slurp(dir / "b" / (stem + ".meta.tsv")));
    EXPECT_EQ(read_wav((dir / "a" / (stem + ".wav")).string()).size(), 38400u);
  }
}
