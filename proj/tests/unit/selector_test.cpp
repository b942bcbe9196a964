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

#include <algorithm>
#include <cmath>
#include <fstream>

#include "egg/backend.hpp"
#include "egg/embedding_cache.hpp"
#include "egg/error.hpp"
#include "egg/selector.hpp"
#include "gradient_check.hpp"
#include "test_support.hpp"

namespace egg {

// Readable parameter names in test listings.
void PrintTo(RadiusMap m, std::ostream* os) { *os << to_string(m); }

namespace {

std::vector<double> random_vector(SplitMix64& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
  return v;
}

PredicateSphere sphere(std::vector<double> c, double r) { return {std::move(c), r}; }

TEST(SphereHeadTest, ZeroHeadExp) {
  const SphereHead head(HeadDims{8, 4, 3}, RadiusMap::kExp);
  const auto s = head.sphere(std::vector<double>(8, 0.7));
  EXPECT_EQ(s.center, std::vector<double>(3, 0.0));
  EXPECT_DOUBLE_EQ(s.radius, 1.0);
}

TEST(SphereHeadTest, RadiusMaps) {
  const SphereHead sq(HeadDims{2, 2, 2}, RadiusMap::kSquare);
  EXPECT_DOUBLE_EQ(sq.radius_from_logit(-2.0), 4.0);
  EXPECT_DOUBLE_EQ(sq.radius_from_logit(0.0), kMinSquareRadius);
  const SphereHead ex(HeadDims{2, 2, 2}, RadiusMap::kExp);
  EXPECT_NEAR(ex.radius_from_logit(0.5), 1.6487212707001282, 1e-15);
}

TEST(SphereHeadTest, DimensionAndConfigErrors) {
  const SphereHead head(HeadDims{8, 4, 3}, RadiusMap::kExp);
  EXPECT_THROW(head.sphere(std::vector<double>(7, 0.0)), DimensionMismatch);
  EXPECT_THROW(SphereHead(HeadDims{0, 4, 3}, RadiusMap::kExp), ConfigError);
  EXPECT_THROW(parse_radius_map("cube"), ConfigError);
  EXPECT_EQ(parse_radius_map("square"), RadiusMap::kSquare);
  EXPECT_EQ(SphereHead::param_count(HeadDims{8, 4, 3}),
            8u * 4 + 4 + 4 * 3 + 3 + 8 * 4 + 4 + 4 + 1);
}

TEST(SphereHeadTest, InitializationBoundsAndDeterminism) {
  const HeadDims d{20, 5, 3};
  const auto a = SphereHead::initialized(d, RadiusMap::kExp, 9);
  const auto b = SphereHead::initialized(d, RadiusMap::kExp, 9);
  const auto c = SphereHead::initialized(d, RadiusMap::kExp, 10);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const double bound = 1.0 / std::sqrt(20.0);
  for (std::size_t i = 0; i < d.input * d.hidden; ++i) {
    EXPECT_LE(std::abs(a.params()[i]), bound);
  }
}

TEST(OverlapTest, Examples) {
  EXPECT_DOUBLE_EQ(overlap_prob(sphere({0, 0}, 1), sphere({0, 0}, 1)), 1.0);
  EXPECT_DOUBLE_EQ(overlap_prob(sphere({0, 0}, 1), sphere({5, 0}, 1)), 0.0);
  EXPECT_DOUBLE_EQ(overlap_prob(sphere({0, 0}, 1), sphere({3, 0}, 3)), 0.5);
  EXPECT_DOUBLE_EQ(center_distance(sphere({0, 0}, 1), sphere({3, 4}, 1)), 5.0);
}

TEST(SelectorScoreTest, Examples) {
  EXPECT_DOUBLE_EQ(selector_score(1.7, 2.0, 2.0), 0.5);
  EXPECT_NEAR(selector_score(2.0, 1.0, 4.0), 1.0 / (1.0 + std::exp(3.0)), 1e-16);
  EXPECT_NEAR(selector_score(2.0, 1.0, 4.0), 0.04743, 1e-5);
  EXPECT_DOUBLE_EQ(selector_score(1.0, 3.0, 3.0), 0.5);
  EXPECT_DOUBLE_EQ(overlap_prob(1.0, 3.0, 3.0), 0.5);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
  EXPECT_DOUBLE_EQ(sigmoid(-800.0), 0.0);
  EXPECT_DOUBLE_EQ(sigmoid(800.0), 1.0);
}

TEST(OverlapProperty, BranchContinuity) {
  SplitMix64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const double rp = 0.01 + 10.0 * rng.uniform();
    const double d = 20.0 * rng.uniform();
    const double lo = d - rp;
    const double hi = d + rp;
    if (lo > 0) {
      EXPECT_NEAR(overlap_prob(rp, lo, d), 0.0, 1e-12);
    }
    EXPECT_NEAR(overlap_prob(rp, hi, d), 1.0, 1e-12);
  }
}

TEST(OverlapProperty, RangeAndMonotonicity) {
  SplitMix64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const double rp = 0.01 + 5.0 * rng.uniform();
    const double rq1 = 5.0 * rng.uniform();
    const double rq2 = rq1 + rng.uniform();
    const double d = 8.0 * rng.uniform();
    const double a = overlap_prob(rp, rq1, d);
    const double b = overlap_prob(rp, rq2, d);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_LE(a, b);
    EXPECT_LE(selector_score(rp, rq1, d), selector_score(rp, rq2, d));
  }
}

TEST(RankConsistency, StrictOrdersNeverInvert) {
  SplitMix64 rng(31337);
  std::size_t inversions = 0;
  for (int p = 0; p < 1000; ++p) {
    const auto prem = sphere(random_vector(rng, 3, 2.0), 0.05 + 2.0 * rng.uniform());
    std::vector<std::pair<double, double>> s;  // (overlap, selector)
    for (int q = 0; q < 100; ++q) {
      const auto hyp = sphere(random_vector(rng, 3, 2.0), 0.05 + 2.0 * rng.uniform());
      s.emplace_back(overlap_prob(prem, hyp), selector_score(prem, hyp));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (s[i].second > s[j].second && s[i].first < s[j].first) ++inversions;
      }
    }
  }
  EXPECT_EQ(inversions, 0u);
}

class GradientCheck : public ::testing::TestWithParam<RadiusMap> {};

TEST_P(GradientCheck, MatchesFiniteDifferences) {
  for (std::uint64_t b = 0; b < 10; ++b) {
    const auto batch = testing::make_check_batch(GetParam(), b);
    const auto r = testing::check_gradient(batch.head, batch.examples, 1e-4);
    EXPECT_LT(r.rel_error, 1e-4) << "batch " << b;
    EXPECT_LT(r.skipped, batch.head.params().size() / 4) << "batch " << b;
  }
}

INSTANTIATE_TEST_SUITE_P(Maps, GradientCheck,
                         ::testing::Values(RadiusMap::kExp, RadiusMap::kSquare),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(GradientTest, StationaryWhenTargetsMatchPredictions) {
  const HeadDims dims{6, 4, 3};
  const auto head = SphereHead::initialized(dims, RadiusMap::kExp, 3);
  SplitMix64 rng(4);
  std::vector<std::vector<double>> vecs;
  for (int i = 0; i < 8; ++i) vecs.push_back(random_vector(rng, dims.input));
  std::vector<TrainExample> batch;
  for (int i = 0; i < 4; ++i) {
    const auto p = head.sphere(vecs[2 * i]);
    const auto q = head.sphere(vecs[2 * i + 1]);
    batch.push_back({vecs[2 * i], vecs[2 * i + 1], selector_score(p, q)});
  }
  for (double g : head_gradient(head, batch)) EXPECT_NEAR(g, 0.0, 1e-15);
}

TEST(GradientTest, CoincidentCentersGiveFiniteGradient) {
  const HeadDims dims{6, 4, 3};
  const auto head = SphereHead::initialized(dims, RadiusMap::kExp, 3);
  const std::vector<double> v(6, 0.3);
  const std::vector<TrainExample> batch = {{v, v, 0.0}};
  for (double g : head_gradient(head, batch)) EXPECT_TRUE(std::isfinite(g));
}

std::vector<std::vector<double>> one_hots(std::size_t n) {
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 1.0;
  return out;
}

TEST(TrainHeadTest, SeparableToyReachesPerfectF1) {
  const auto v = one_hots(4);
  const std::vector<TrainExample> data = {
      {v[0], v[1], 1.0}, {v[2], v[3], 1.0}, {v[1], v[0], 0.0}, {v[3], v[2], 0.0}};
  SelectorTrainConfig cfg;
  cfg.seed = 42;
  cfg.learning_rate = 0.05;
  cfg.patience = 200;
  const auto init = SphereHead::initialized(HeadDims{4, 8, 4}, RadiusMap::kExp, 42);
  const auto r = train_head(init, data, {}, cfg);
  EXPECT_DOUBLE_EQ(selector_f1(r.head, data), 1.0);
  EXPECT_LE(r.best_epoch, 200);
}

TEST(TrainHeadTest, PlateauKeepsInitialization) {
  const auto v = one_hots(4);
  const std::vector<TrainExample> data = {{v[0], v[1], 1.0}, {v[1], v[0], 0.0}};
  SelectorTrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.weight_decay = 0.0;
  cfg.patience = 3;
  const auto init = SphereHead::initialized(HeadDims{4, 3, 2}, RadiusMap::kExp, 1);
  const auto r = train_head(init, data, data, cfg);
  EXPECT_EQ(r.best_epoch, 0);
  EXPECT_EQ(r.head, init);
  EXPECT_EQ(r.history.size(), 4u);
}

TEST(TrainHeadTest, DeterministicAndRejectsSingleClass) {
  SplitMix64 rng(8);
  std::vector<std::vector<double>> vecs;
  for (int i = 0; i < 40; ++i) vecs.push_back(random_vector(rng, 6));
  std::vector<TrainExample> data;
  for (int i = 0; i < 20; ++i) data.push_back({vecs[2 * i], vecs[2 * i + 1], i % 3 == 0 ? 1.0 : 0.0});
  SelectorTrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.batch_size = 4;
  const auto init = SphereHead::initialized(HeadDims{6, 4, 3}, RadiusMap::kSquare, 2);
  const auto a = train_head(init, data, {}, cfg);
  const auto b = train_head(init, data, {}, cfg);
  EXPECT_EQ(a.head, b.head);
  EXPECT_EQ(a.best_epoch, b.best_epoch);
  std::vector<TrainExample> pos(data.begin(), data.begin() + 1);
  EXPECT_THROW(train_head(init, pos, {}, cfg), DegenerateData);
}

std::vector<PredicateSphere> random_spheres(std::size_t n, std::uint64_t seed,
                                            std::size_t dim = 3) {
  SplitMix64 rng(seed);
  std::vector<PredicateSphere> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(sphere(random_vector(rng, dim, 2.0), 0.1 + 2.0 * rng.uniform()));
  }
  return out;
}

TEST(TopEdgesTest, SmallCases) {
  const auto two = random_spheres(2, 1);
  const auto all = select_top_edges(two, 10);
  ASSERT_EQ(all.size(), 2u);
  const auto best = select_top_edges(two, 1);
  ASSERT_EQ(best.size(), 1u);
  EXPECT_EQ(best[0].score, std::max(all[0].score, all[1].score));
}

TEST(TopEdgesTest, MatchesBruteForce) {
  const auto s = random_spheres(100, 77);
  struct Item {
    double score;
    std::size_t i, j;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i != j) items.push_back({selector_score(s[i], s[j]), i, j});
    }
  }
  ASSERT_EQ(items.size(), 9900u);
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  for (std::size_t workers : {1u, 4u}) {
    const auto top = select_top_edges(s, 500, workers);
    ASSERT_EQ(top.size(), 500u);
    for (std::size_t k = 0; k < 500; ++k) {
      EXPECT_EQ(top[k].premise, items[k].i);
      EXPECT_EQ(top[k].hypothesis, items[k].j);
      EXPECT_EQ(top[k].score, items[k].score);
    }
  }
}

TEST(TopEdgesTest, TiesGoToSmallerIndices) {
  const std::vector<PredicateSphere> same(4, sphere({0, 0}, 1));
  const auto top = select_top_edges(same, 3, 2);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(std::make_pair(top[0].premise, top[0].hypothesis), std::make_pair(0ul, 1ul));
  EXPECT_EQ(std::make_pair(top[1].premise, top[1].hypothesis), std::make_pair(0ul, 2ul));
  EXPECT_EQ(std::make_pair(top[2].premise, top[2].hypothesis), std::make_pair(0ul, 3ul));
}

TEST(AuditTest, IdenticalSpheresQualifyAndHold) {
  const auto s = sphere({1, 2, 3}, 0.7);
  for (double eps : {0.1, 0.6, 0.99}) {
    bool q = false;
    EXPECT_TRUE(transitivity_bound_holds(s, s, s, eps, &q));
    EXPECT_TRUE(q);
  }
}

TEST(AuditTest, ConstructedTriplesHaveNoViolations) {
  for (std::size_t dim : {3u, 16u}) {
    for (double eps : {0.6, 0.9, 0.99}) {
      const auto r = transitivity_audit_constructed(dim, eps, 20000, 5);
      EXPECT_EQ(r.trials, 20000u);
      EXPECT_EQ(r.qualifying, r.trials);
      EXPECT_EQ(r.violations, 0u) << dim << " " << eps;
    }
  }
}

TEST(AuditTest, RandomIndexTriples) {
  const auto s = random_spheres(50, 3);
  const auto r = transitivity_audit(s, 0.6, 20000, 1);
  EXPECT_EQ(r.trials, 20000u);
  EXPECT_GT(r.qualifying, 0u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(AuditTest, DetectsBrokenBound) {
  // Pr(a->b) = Pr(b->c) = 1 but a and c are far apart: only possible with
  // an inconsistent geometry, so the checker must flag it.
  const auto a = sphere({0.0}, 1.0);
  const auto b = sphere({0.0}, 1.0);
  const auto c = sphere({0.0}, 1.0);
  EXPECT_TRUE(transitivity_bound_holds(a, b, c, 0.9));
  const auto far = sphere({100.0}, 1.0);
  bool q = true;
  transitivity_bound_holds(a, b, far, 0.9, &q);
  EXPECT_FALSE(q);
}

TEST(CheckpointTest, RoundTripAndCorruption) {
  testing::TempDir dir;
  const auto head = SphereHead::initialized(HeadDims{10, 4, 3}, RadiusMap::kSquare, 5);
  save_head(head, dir / "h.bin");
  EXPECT_EQ(load_head(dir / "h.bin"), head);

  auto bytes = testing::read_text(dir / "h.bin");
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  testing::write_text(dir / "flip.bin", flipped);
  EXPECT_THROW(load_head(dir / "flip.bin"), FormatError);
  testing::write_text(dir / "short.bin", bytes.substr(0, bytes.size() - 9));
  EXPECT_THROW(load_head(dir / "short.bin"), FormatError);
  testing::write_text(dir / "magic.bin", "NOTAHEAD" + bytes.substr(8));
  EXPECT_THROW(load_head(dir / "magic.bin"), FormatError);
}

TEST(EmbeddingCacheTest, RoundTripAndErrors) {
  testing::TempDir dir;
  EmbeddingCache cache(4);
  cache.put("(adore.1,adore.2,person,government)", {0.1, 0.2, 0.3, 0.4});
  cache.put("(know.1,know.2,person,government)", {1e-300, -2.5, 3.0, 0.0});
  EXPECT_THROW(cache.put("x", {1.0}), DimensionMismatch);
  cache.save(dir / "c.bin");
  const auto back = EmbeddingCache::load(dir / "c.bin");
  EXPECT_EQ(back, cache);
  ASSERT_NE(back.find("(know.1,know.2,person,government)"), nullptr);
  EXPECT_EQ(back.find("missing"), nullptr);
  auto bytes = testing::read_text(dir / "c.bin");
  bytes[20] ^= 0x01;
  testing::write_text(dir / "bad.bin", bytes);
  EXPECT_THROW(EmbeddingCache::load(dir / "bad.bin"), FormatError);
}

}  // namespace
}  // namespace egg
