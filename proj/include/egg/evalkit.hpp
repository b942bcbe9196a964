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

#ifndef EGG_EVALKIT_HPP_
#define EGG_EVALKIT_HPP_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "egg/graph.hpp"
#include "egg/lexicon.hpp"
#include "egg/predicate.hpp"

namespace egg {

enum class Split { kValid, kTest };

std::string_view to_string(Split s);

struct LabeledPair {
  TypedPredicate premise;
  TypedPredicate hypothesis;
  bool label = false;
  Split split = Split::kTest;
};

struct DatasetCounts {
  std::size_t total = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

// Lines "<premise>\t<hypothesis>\t<True|False>[\t<valid|test>]"; blank lines
// and '#' comments skipped; the split defaults to test. Throws FormatError
// with the line number, including for pairs whose type pairs differ.
std::vector<LabeledPair> parse_dataset(std::string_view text,
                                       const std::string& source);
std::vector<LabeledPair> load_dataset(const std::filesystem::path& path);
DatasetCounts count_pairs(std::span<const LabeledPair> pairs);
std::vector<LabeledPair> filter_split(std::span<const LabeledPair> pairs,
                                      Split split);

struct ScoringStrategies {
  bool relaxed_match = true;
  bool lemma_backup = true;
  bool average_backup = true;
};

// Lemmatized relation tokens, argument indices and negation all agree.
bool lemma_equivalent(const TypedPredicate& p, const TypedPredicate& q,
                      const Lexicon& lexicon = Lexicon::builtin());

enum class ScoreSource { kGraph, kLemma, kAverage, kMissing };

struct PairScore {
  double score = 0.0;
  ScoreSource source = ScoreSource::kMissing;
};

PairScore score_pair(const GraphCollection& graphs, const LabeledPair& pair,
                     const ScoringStrategies& strategies,
                     const Lexicon& lexicon = Lexicon::builtin());

std::vector<PairScore> score_pairs(const GraphCollection& graphs,
                                   std::span<const LabeledPair> pairs,
                                   const ScoringStrategies& strategies,
                                   std::size_t workers = 1,
                                   const Lexicon& lexicon = Lexicon::builtin());

enum class CurveKind { kPR, kROC };

struct Curve {
  CurveKind kind = CurveKind::kPR;
  std::vector<std::pair<double, double>> points;  // (x, y), x non-decreasing
};

// Threshold sweep over distinct scores, equal scores forming one step.
// PR: (recall, precision), starting at recall 0 with the precision of the
// highest-score group and ending at recall 1 with the base rate.
// ROC: (false positive rate, true positive rate) from (0, 0) to (1, 1).
// Both throw DegenerateLabels unless there is at least one label of each
// class.
Curve pr_curve(std::span<const double> scores, const std::vector<bool>& labels);
Curve roc_curve(std::span<const double> scores,
                const std::vector<bool>& labels);

// Trapezoidal area. With a floor, only the parts of the curve at or above
// it contribute (segments are clipped where they cross the floor).
double auc(const Curve& curve, std::optional<double> floor = std::nullopt);

// Averages the class probabilities of two logit triples.
std::array<double, 3> ensemble_mean(const std::array<double, 3>& a,
                                    const std::array<double, 3>& b);

enum class FinetuneTarget { kGenerator, kWeigher };

struct ExportStats {
  std::size_t records = 0;
  std::size_t skipped = 0;  // pairs that could not be rendered
};

// Line-delimited JSON. Generator target: two {"prompt", "fill"} records per
// positive pair, one per letter assignment of the pair's types. Weigher
// target: one {"premise", "hypothesis", "label"} record per pair, label
// "entailment" for positives and "neutral" for negatives.
ExportStats export_finetune_data(std::span<const LabeledPair> pairs,
                                 FinetuneTarget target,
                                 const std::filesystem::path& out_path,
                                 const Lexicon& lexicon = Lexicon::builtin());

void write_curve_csv(const Curve& curve, const std::filesystem::path& path);

}  // namespace egg

#endif  // EGG_EVALKIT_HPP_
