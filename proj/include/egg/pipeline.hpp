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

#ifndef EGG_PIPELINE_HPP_
#define EGG_PIPELINE_HPP_

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "egg/backend.hpp"
#include "egg/config.hpp"
#include "egg/embedding_cache.hpp"
#include "egg/evalkit.hpp"
#include "egg/generator.hpp"
#include "egg/graph.hpp"
#include "egg/selector.hpp"
#include "egg/weigher.hpp"

namespace egg {

// Letter map for a predicate: the configured "t1,t2" order when it names the
// predicate's types, the lexicographic order otherwise.
TypePair letter_map_for(const TypedPredicate& p, const std::string& types);

// The shared letter map of a predicate list. Throws DegenerateData when the
// list is empty or mixes type pairs.
TypePair shared_letter_map(std::span<const TypedPredicate> predicates,
                           const std::string& types);

struct EmbedResult {
  EmbeddingCache cache;
  std::vector<TypedPredicate> skipped;  // not renderable under the map
};

// Embeds the rendered sentence of each predicate, keyed by predicate text.
EmbedResult embed_predicates(std::span<const TypedPredicate> predicates,
                             const TypePair& tp, Backend& backend,
                             const Lexicon& lexicon = Lexicon::builtin());

// Top-k ordered pairs by selector score over the predicates present in the
// cache, best first. Throws DimensionMismatch if the cache and head disagree.
std::vector<WeightedEdge> select_edges(
    std::span<const TypedPredicate> predicates, const EmbeddingCache& cache,
    const SphereHead& head, std::size_t k, std::size_t workers);

ScoredEdges weigh_edges(std::span<const WeightedEdge> selected,
                        const TypePair& tp, Backend& backend,
                        const Lexicon& lexicon = Lexicon::builtin());

// The head used when no checkpoint is given.
SphereHead default_head(const PipelineConfig& cfg);

// Trains the selector head on dataset pairs. A seeded holdout of
// cfg.holdout_fraction drives early stopping.
TrainResult train_selector(std::span<const LabeledPair> pairs,
                           const PipelineConfig& cfg, Backend& backend,
                           const Lexicon& lexicon = Lexicon::builtin());

struct EvalReport {
  DatasetCounts counts;
  std::size_t from_graph = 0;
  std::size_t from_lemma = 0;
  std::size_t from_average = 0;
  std::size_t missing = 0;
  Curve pr;
  Curve roc;
  double auc_pr = 0.0;
  double auc_roc = 0.0;

  std::string to_json() const;
};

EvalReport evaluate(const GraphCollection& graphs,
                    std::span<const LabeledPair> pairs,
                    const ScoringStrategies& strategies,
                    std::optional<double> floor, std::size_t workers,
                    const Lexicon& lexicon = Lexicon::builtin());

struct PipelineRun {
  ExpandResult generated;
  EmbedResult embedded;
  std::vector<WeightedEdge> selected;
  ScoredEdges weighted;
  EntailmentGraph graph;
};

// Seeds to graph in one call, with the same stage functions the command
// line uses.
PipelineRun run_pipeline(const std::set<TypedPredicate>& seeds,
                         const PipelineConfig& cfg, Backend& backend,
                         const SphereHead& head,
                         const Lexicon& lexicon = Lexicon::builtin());

}  // namespace egg

#endif  // EGG_PIPELINE_HPP_
