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

#include <chrono>
#include <fstream>

#include "egg/error.hpp"
#include "egg/generator.hpp"
#include "test_support.hpp"
#include "worked_example.hpp"

namespace egg {
namespace {

const TypePair kPG = TypePair::ordered(ArgType("person"), ArgType("government"));

std::set<TypedPredicate> seeds_of_example() { return testing::example_seeds(); }
using testing::example_config;
using testing::expected_stages;
using testing::replay_script;

TEST(BuildPromptsTest, AdoreExample) {
  const auto p = build_prompts(parse_predicate("(adore.1,adore.2,person,government)"), kPG);
  EXPECT_EQ(p.ab,
            "Person A adores Government B, which entails that Person A <FILL> "
            "Government B.");
  EXPECT_EQ(p.ba,
            "Person A adores Government B, which entails that Government B <FILL> "
            "Person A.");
}

TEST(BuildPromptsTest, CopulaAndSameType) {
  const auto be = build_prompts(parse_predicate("(be.1,be.2,person,government)"), kPG);
  EXPECT_NE(be.ab, be.ba);
  EXPECT_EQ(be.ab.find("Person A is Government B, which entails that"), 0u);
  const auto tt = TypePair::canonical(ArgType("thing"), ArgType("thing"));
  const auto eat = build_prompts(parse_predicate("(eat.1,eat.2,thing,thing)"), tt);
  EXPECT_EQ(eat.ab, "Thing A eats Thing B, which entails that Thing A <FILL> Thing B.");
  EXPECT_EQ(eat.ba, "Thing A eats Thing B, which entails that Thing B <FILL> Thing A.");
  EXPECT_THROW(build_prompts(parse_predicate("(adore.1,know.2,person,government)"), kPG),
               UnsupportedShape);
}

TEST(ResolveOutputsTest, Examples) {
  EXPECT_EQ(resolve_outputs({"is identified with"}, Orientation::kAB, kPG),
            std::set<TypedPredicate>{
                parse_predicate("(identify.2,identify.with.2,person,government)")});
  EXPECT_TRUE(resolve_outputs({"xyzzy plugh"}, Orientation::kAB, kPG).empty());
  EXPECT_EQ(resolve_outputs({"adores", "adores"}, Orientation::kAB, kPG).size(), 1u);
  EXPECT_EQ(resolve_outputs({"is drawn to"}, Orientation::kBA, kPG),
            std::set<TypedPredicate>{parse_predicate("(draw.2,draw.to.2,government,person)")});
}

TEST(ExpandReplay, WorkedExampleYieldsSeventeenPredicates) {
  const auto start = std::chrono::steady_clock::now();
  ScriptedBackend backend(replay_script());
  const auto r = expand(seeds_of_example(), kPG, example_config(), backend);
  const auto want = expected_stages();
  std::set<TypedPredicate> all;
  for (const auto& [k, v] : want) all.insert(v.begin(), v.end());
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(r.predicates, all);
  EXPECT_EQ(r.predicates.size(), 17u);
  ASSERT_EQ(r.stages.size(), 2u);
  EXPECT_EQ(std::set<TypedPredicate>(r.stages[0].promoted.begin(),
                                     r.stages[0].promoted.end()),
            want.at("S1"));
  EXPECT_EQ(std::set<TypedPredicate>(r.stages[1].promoted.begin(),
                                     r.stages[1].promoted.end()),
            want.at("S2"));
  EXPECT_EQ(r.stages[0].queries, 6u);
  EXPECT_EQ(r.stages[1].queries, 10u);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(ExpandTest, NoResolvableFillsReachesFixpoint) {
  ScriptedBackend backend({});
  const auto seeds = seeds_of_example();
  const auto r = expand(seeds, kPG, example_config(), backend);
  EXPECT_EQ(r.predicates, seeds);
  EXPECT_EQ(r.stages.size(), 1u);
}

TEST(ExpandTest, SeedsAboveLimitRunNoStage) {
  ScriptedBackend backend(replay_script());
  auto cfg = example_config();
  cfg.max_predicates = 2;
  const auto seeds = seeds_of_example();
  const auto r = expand(seeds, kPG, cfg, backend);
  EXPECT_EQ(r.predicates, seeds);
  EXPECT_TRUE(r.stages.empty());
  EXPECT_EQ(backend.calls(), 0u);
}

TEST(ExpandTest, RejectsBadInput) {
  ScriptedBackend backend({});
  EXPECT_THROW(expand({}, kPG, example_config(), backend), DegenerateData);
  auto cfg = example_config();
  cfg.num_return = 9;
  EXPECT_THROW(expand(seeds_of_example(), kPG, cfg, backend), ConfigError);
  const std::set<TypedPredicate> wrong = {
      parse_predicate("(eat.1,eat.2,thing,thing)")};
  EXPECT_THROW(expand(wrong, kPG, example_config(), backend), UnsupportedShape);
}

// Fails every request whose prompt contains a marker substring.
class FailingBackend : public ScriptedBackend {
 public:
  FailingBackend(std::map<std::string, std::vector<std::string>> script,
                 std::string marker)
      : ScriptedBackend(std::move(script)), marker_(std::move(marker)) {}

 protected:
  std::vector<std::string> do_generate(const GenRequest& req) override {
    if (req.prompt.find(marker_) != std::string::npos) {
      throw BackendUnreachable("scripted outage");
    }
    return ScriptedBackend::do_generate(req);
  }

 private:
  std::string marker_;
};

TEST(ExpandTest, BackendErrorAbortsStageAtomically) {
  FailingBackend backend(replay_script(), "identifies with");
  const auto r = expand(seeds_of_example(), kPG, example_config(), backend);
  EXPECT_TRUE(r.aborted);
  EXPECT_FALSE(r.warnings.empty());
  const auto want = expected_stages();
  std::set<TypedPredicate> first;
  first.insert(want.at("S0").begin(), want.at("S0").end());
  first.insert(want.at("S1").begin(), want.at("S1").end());
  EXPECT_EQ(r.predicates, first);
}

class MockExpand : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(MockExpand, Invariants) {
  GenerationConfig cfg;
  cfg.max_predicates = 30;
  const auto seeds = seeds_of_example();
  MockBackend a(GetParam()), b(GetParam());
  const auto r1 = expand(seeds, kPG, cfg, a);
  const auto r2 = expand(seeds, kPG, cfg, b);
  // Determinism, including the per-stage trace.
  EXPECT_EQ(r1.predicates, r2.predicates);
  ASSERT_EQ(r1.stages.size(), r2.stages.size());
  for (std::size_t i = 0; i < r1.stages.size(); ++i) {
    EXPECT_EQ(r1.stages[i].promoted, r2.stages[i].promoted);
  }
  // Seed preservation.
  for (const auto& s : seeds) EXPECT_TRUE(r1.predicates.contains(s));
  // Two sources for every generated predicate.
  for (const auto& p : r1.predicates) {
    if (seeds.contains(p)) continue;
    ASSERT_TRUE(r1.source_counts.contains(p)) << p.text();
    EXPECT_GE(r1.source_counts.at(p), 2u) << p.text();
  }
  // Size bound.
  ASSERT_FALSE(r1.stages.empty());
  EXPECT_LE(r1.predicates.size(),
            cfg.max_predicates + r1.stages.back().promoted.size());
  // Frontier sets nest inside the accumulated set, stage after stage.
  std::set<TypedPredicate> acc = seeds;
  for (const auto& st : r1.stages) {
    for (const auto& p : st.frontier) EXPECT_TRUE(acc.contains(p));
    for (const auto& p : st.promoted) EXPECT_FALSE(acc.contains(p));
    acc.insert(st.promoted.begin(), st.promoted.end());
  }
  EXPECT_EQ(acc, r1.predicates);
}

INSTANTIATE_TEST_SUITE_P(Seeds, MockExpand, ::testing::Values(1, 7, 42, 1234));

TEST(ExpandGolden, MockSeedSeven) {
  GenerationConfig cfg;
  cfg.max_predicates = 30;
  MockBackend mock(7);
  const auto r = expand(seeds_of_example(), kPG, cfg, mock);
  const auto want = read_predicate_file(testing::data_path("mock_seed7_predicates.txt"));
  EXPECT_EQ(r.predicates, std::set<TypedPredicate>(want.begin(), want.end()));
}

TEST(PredicateFileTest, RoundTripAndErrors) {
  testing::TempDir dir;
  const auto seeds = seeds_of_example();
  write_predicate_file(dir / "p.txt", seeds);
  const auto back = read_predicate_file(dir / "p.txt");
  EXPECT_EQ(std::set<TypedPredicate>(back.begin(), back.end()), seeds);
  testing::write_text(dir / "bad.txt",
                      "# comment\n(adore.1,adore.2,person,government)\n\n(oops)\n");
  try {
    read_predicate_file(dir / "bad.txt");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(GenerationConfigTest, Validation) {
  GenerationConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.beam = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_fill_tokens = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_predicates = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace egg
