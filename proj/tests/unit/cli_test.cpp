// Copyright 2026 The eggkit Authors. All Rights Reserved.
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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "egg/backend.hpp"
#include "egg/cli.hpp"
#include "egg/config.hpp"
#include "egg/error.hpp"
#include "egg/generator.hpp"
#include "egg/pipeline.hpp"
#include "test_support.hpp"

namespace egg {
namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(ConfigTest, DefaultsValidate) {
  const PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.k_edge, 20000000u);
  EXPECT_EQ(cfg.k_nbr, 5u);
  EXPECT_EQ(cfg.floor(), std::nullopt);
  EXPECT_EQ(PipelineConfig::keys().size(), 28u);
}

TEST(ConfigTest, OverridesAndErrorsNameTheKey) {
  PipelineConfig cfg;
  cfg.apply_override("selector.f_plus=square");
  cfg.apply_override("eval.precision_floor=0.5");
  cfg.apply_json(R"({"generate.beam": 7, "eval.relaxed_match": false})");
  EXPECT_EQ(cfg.f_plus, "square");
  EXPECT_EQ(cfg.floor(), 0.5);
  EXPECT_EQ(cfg.beam, 7u);
  EXPECT_FALSE(cfg.relaxed_match);
  try {
    cfg.apply_override("selector.nope=1");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("selector.nope"), std::string::npos);
  }
  PipelineConfig bad;
  bad.apply_override("selector.f_plus=cube");
  try {
    bad.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("selector.f_plus"), std::string::npos);
  }
  EXPECT_THROW(cfg.apply_override("generate.beam=many"), ConfigError);
  EXPECT_THROW(cfg.apply_override("no_equals_sign"), ConfigError);
  EXPECT_THROW(cfg.apply_json("[1]"), ConfigError);
}

TEST(ConfigTest, DumpRoundTrips) {
  PipelineConfig cfg;
  cfg.apply_override("seed=99");
  cfg.apply_override("generate.types=person,government");
  PipelineConfig back;
  back.apply_json(cfg.dump());
  EXPECT_EQ(back.dump(), cfg.dump());
  EXPECT_EQ(back.seed, 99u);
}

TEST(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  testing::TempDir dir;
  const auto seeds = testing::data_path("seeds.txt").string();
  const auto r = cli({"--set", "selector.bogus=1", "generate", "--seeds", seeds, "--out",
                      (dir / "p.txt").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("selector.bogus"), std::string::npos);
  const auto f = cli({"--set", "selector.f_plus=cube", "generate", "--seeds", seeds, "--out",
                      (dir / "p.txt").string()});
  EXPECT_EQ(f.code, kExitUsage);
  EXPECT_NE(f.err.find("selector.f_plus"), std::string::npos);
}

TEST(CliTest, FormatAndBackendExitCodes) {
  testing::TempDir dir;
  testing::write_text(dir / "bad.txt", "(adore.1,adore.2,person\n");
  EXPECT_EQ(cli({"generate", "--seeds", (dir / "bad.txt").string(), "--out",
                 (dir / "p.txt").string()})
                .code,
            kExitFormat);
  const auto seeds = testing::data_path("seeds.txt").string();
  EXPECT_EQ(cli({"--backend", "http://127.0.0.1:1", "--set", "backend.timeout_ms=500", "generate",
                 "--seeds", seeds, "--out", (dir / "p.txt").string()})
                .code,
            kExitBackend);
}

TEST(CliTest, GenerateIsDeterministic) {
  testing::TempDir dir;
  const auto seeds = testing::data_path("seeds.txt").string();
  for (const char* name : {"a.txt", "b.txt"}) {
    ASSERT_EQ(cli({"--seed", "7", "--set", "generate.max_predicates=40", "generate", "--seeds",
                   seeds, "--out", (dir / name).string()})
                  .code,
              kExitOk);
  }
  EXPECT_EQ(testing::read_text(dir / "a.txt"), testing::read_text(dir / "b.txt"));
  EXPECT_FALSE(testing::read_text(dir / "a.txt").empty());
}

// The staged command line and the single-call pipeline must agree bit for bit.
TEST(CliTest, StagedChainMatchesPipeline) {
  testing::TempDir dir;
  const auto seeds = testing::data_path("seeds.txt").string();
  const std::vector<std::string> global = {
      "--seed", "7", "--set", "generate.max_predicates=30", "--set", "selector.k_edge=60",
      "--set", "generate.types=person,government", "--set", "workers=3"};
  auto run = [&](std::vector<std::string> tail) {
    std::vector<std::string> args = global;
    args.insert(args.end(), tail.begin(), tail.end());
    const auto r = cli(args);
    EXPECT_EQ(r.code, kExitOk) << r.err;
  };
  const auto p = [&](const char* n) { return (dir / n).string(); };
  run({"generate", "--seeds", seeds, "--out", p("preds.txt")});
  run({"embed", "--predicates", p("preds.txt"), "--out", p("emb.bin")});
  run({"select", "--predicates", p("preds.txt"), "--embeddings", p("emb.bin"), "--out",
       p("sel.tsv")});
  run({"weigh", "--edges", p("sel.tsv"), "--out", p("w.tsv")});
  run({"build", "--predicates", p("preds.txt"), "--edges", p("w.tsv"), "--out", p("g.egg")});

  PipelineConfig cfg;
  cfg.seed = 7;
  cfg.max_predicates = 30;
  cfg.k_edge = 60;
  cfg.types = "person,government";
  cfg.workers = 3;
  MockBackend mock(7);
  const auto seeds_set = read_predicate_file(seeds);
  const auto run_all = run_pipeline({seeds_set.begin(), seeds_set.end()}, cfg, mock,
                                    default_head(cfg));
  EXPECT_EQ(run_all.selected.size(), 60u);
  EXPECT_EQ(testing::read_text(dir / "g.egg"), serialize(run_all.graph));
}

TEST(CliTest, EvalReportFields) {
  testing::TempDir dir;
  const auto seeds = testing::data_path("seeds.txt").string();
  const auto p = [&](const char* n) { return (dir / n).string(); };
  ASSERT_EQ(cli({"--seed", "7", "--set", "generate.max_predicates=30", "generate", "--seeds", seeds,
                 "--out", p("preds.txt")})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"embed", "--predicates", p("preds.txt"), "--out", p("emb.bin")}).code, kExitOk);
  ASSERT_EQ(cli({"--set", "selector.k_edge=100", "select", "--predicates", p("preds.txt"),
                 "--embeddings", p("emb.bin"), "--out", p("sel.tsv")})
                .code,
            kExitOk);
  ASSERT_EQ(cli({"weigh", "--edges", p("sel.tsv"), "--out", p("w.tsv")}).code, kExitOk);
  ASSERT_EQ(cli({"build", "--predicates", p("preds.txt"), "--edges", p("w.tsv"), "--out",
                 p("graphs/g.egg")})
                .code,
            kExitOk);
  const auto r = cli({"eval", "--graphs", p("graphs"), "--dataset",
                      testing::data_path("pairs30.tsv").string(), "--split", "all", "--report",
                      p("report.json"), "--curves", p("curve")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(testing::read_text(dir / "report.json"));
  for (const char* k : {"pairs", "positive", "negative", "scored_by", "auc_pr", "auc_roc"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j["pairs"], 30);
  EXPECT_EQ(j["positive"], 15);
  const auto& by = j["scored_by"];
  EXPECT_EQ(by["graph"].get<int>() + by["lemma"].get<int>() + by["average"].get<int>() +
                by["missing"].get<int>(),
            30);
  EXPECT_GE(j["auc_pr"].get<double>(), 0.0);
  EXPECT_LE(j["auc_roc"].get<double>(), 1.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "curve_pr.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "curve_roc.csv"));
}

TEST(CliTest, TrainAuditAndExport) {
  testing::TempDir dir;
  const auto ds = testing::data_path("pairs30.tsv").string();
  const auto p = [&](const char* n) { return (dir / n).string(); };
  const auto t = cli({"--set", "selector.max_epochs=5", "--set", "selector.holdout_fraction=0.3",
                      "train-selector", "--dataset", ds, "--split", "all", "--out", p("head.bin")});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_EQ(load_head(dir / "head.bin").dims().input, 768u);
  const auto a = cli({"audit", "--eps", "0.9", "--dim", "3", "--trials", "2000"});
  EXPECT_EQ(a.code, kExitOk) << a.err;
  EXPECT_NE(a.out.find("violations"), std::string::npos);
  const auto e = cli({"export-finetune", "--dataset", ds, "--split", "test", "--target", "weigher",
                      "--out", p("ft.jsonl")});
  EXPECT_EQ(e.code, kExitOk) << e.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "ft.jsonl"));
}

}  // namespace
}  // namespace egg
