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

#include "egg/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "egg/error.hpp"
#include "egg/surface.hpp"
#include "json.hpp"

namespace egg {

TypePair letter_map_for(const TypedPredicate& p, const std::string& types) {
  const TypePair canon = type_pair_of(p).canonicalized();
  if (!types.empty()) {
    const auto comma = types.find(',');
    if (comma != std::string::npos) {
      const TypePair wanted =
          TypePair::ordered(ArgType(trim(types.substr(0, comma))),
                            ArgType(trim(types.substr(comma + 1))));
      if (wanted.canonicalized() == canon) return wanted;
    }
  }
  return canon;
}

TypePair shared_letter_map(std::span<const TypedPredicate> predicates,
                           const std::string& types) {
  if (predicates.empty()) throw DegenerateData("no predicates");
  const TypePair tp = letter_map_for(predicates.front(), types);
  for (const auto& p : predicates) {
    if (type_pair_of(p).canonicalized() != tp.canonicalized()) {
      throw DegenerateData("predicates mix type pairs: " + p.text() +
                           " vs " + predicates.front().text());
    }
  }
  return tp;
}

EmbedResult embed_predicates(std::span<const TypedPredicate> predicates,
                             const TypePair& tp, Backend& backend,
                             const Lexicon& lexicon) {
  EmbedResult out{EmbeddingCache(backend.dimension()), {}};
  std::vector<const TypedPredicate*> kept;
  std::vector<std::string> sentences;
  for (const auto& p : predicates) {
    try {
      sentences.push_back(render_sentence(p, tp, lexicon).text);
      kept.push_back(&p);
    } catch (const Error&) {
      out.skipped.push_back(p);
    }
  }
  auto vectors = backend.embed_batch(sentences);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.cache.put(kept[i]->text(), std::move(vectors[i].vector));
  }
  return out;
}

std::vector<WeightedEdge> select_edges(
    std::span<const TypedPredicate> predicates, const EmbeddingCache& cache,
    const SphereHead& head, std::size_t k, std::size_t workers) {
  if (cache.dimension() != head.dims().input) {
    throw DimensionMismatch(head.dims().input, cache.dimension());
  }
  std::vector<TypedPredicate> present;
  for (const auto& p : predicates) {
    if (cache.find(p.text())) present.push_back(p);
  }
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  auto spheres = unwrap_all(parallel_map(
      present.size(), workers,
      [&](std::size_t i) { return head.sphere(*cache.find(present[i].text())); }));
  const auto top = select_top_edges(spheres, k, workers);
  std::vector<WeightedEdge> out;
  out.reserve(top.size());
  for (const auto& s : top) {
    out.push_back({present[s.premise], present[s.hypothesis], s.score});
  }
  return out;
}

ScoredEdges weigh_edges(std::span<const WeightedEdge> selected,
                        const TypePair& tp, Backend& backend,
                        const Lexicon& lexicon) {
  std::vector<PredicatePair> pairs;
  pairs.reserve(selected.size());
  for (const auto& e : selected) pairs.emplace_back(e.src, e.dst);
  return score_edges(pairs, tp, backend, lexicon);
}

SphereHead default_head(const PipelineConfig& cfg) {
  return SphereHead::initialized(cfg.head_dims(), cfg.radius_map(), cfg.seed);
}

TrainResult train_selector(std::span<const LabeledPair> pairs,
                           const PipelineConfig& cfg, Backend& backend,
                           const Lexicon& lexicon) {
  std::vector<std::string> sentences;
  sentences.reserve(pairs.size() * 2);
  for (const auto& pair : pairs) {
    const TypePair tp = letter_map_for(pair.premise, cfg.types);
    sentences.push_back(render_sentence(pair.premise, tp, lexicon).text);
    sentences.push_back(render_sentence(pair.hypothesis, tp, lexicon).text);
  }
  const auto vectors = embed_all(backend, sentences);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(stable_hash("holdout:" + std::to_string(cfg.seed)));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const auto holdout = static_cast<std::size_t>(
      cfg.holdout_fraction * static_cast<double>(pairs.size()));
  std::vector<TrainExample> train, valid;
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t i = order[r];
    TrainExample ex{vectors[2 * i], vectors[2 * i + 1],
                    pairs[i].label ? 1.0 : 0.0};
    (r < holdout ? valid : train).push_back(ex);
  }
  const SphereHead init = default_head(cfg);
  return train_head(init, train, valid, cfg.selector_training());
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["pairs"] = counts.total;
  j["positive"] = counts.positive;
  j["negative"] = counts.negative;
  j["scored_by"] = {{"graph", from_graph},
                    {"lemma", from_lemma},
                    {"average", from_average},
                    {"missing", missing}};
  j["auc_pr"] = auc_pr;
  j["auc_roc"] = auc_roc;
  return j.dump();
}

EvalReport evaluate(const GraphCollection& graphs,
                    std::span<const LabeledPair> pairs,
                    const ScoringStrategies& strategies,
                    std::optional<double> floor, std::size_t workers,
                    const Lexicon& lexicon) {
  EvalReport r;
  r.counts = count_pairs(pairs);
  const auto scored = score_pairs(graphs, pairs, strategies, workers, lexicon);
  std::vector<double> scores;
  std::vector<bool> labels;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    scores.push_back(scored[i].score);
    labels.push_back(pairs[i].label);
    switch (scored[i].source) {
      case ScoreSource::kGraph: ++r.from_graph; break;
      case ScoreSource::kLemma: ++r.from_lemma; break;
      case ScoreSource::kAverage: ++r.from_average; break;
      case ScoreSource::kMissing: ++r.missing; break;
    }
  }
  r.pr = pr_curve(scores, labels);
  r.roc = roc_curve(scores, labels);
  r.auc_pr = auc(r.pr, floor);
  r.auc_roc = auc(r.roc);
  return r;
}

PipelineRun run_pipeline(const std::set<TypedPredicate>& seeds,
                         const PipelineConfig& cfg, Backend& backend,
                         const SphereHead& head, const Lexicon& lexicon) {
  const std::vector<TypedPredicate> seed_list(seeds.begin(), seeds.end());
  const TypePair tp = shared_letter_map(seed_list, cfg.types);
  PipelineRun run{expand(seeds, tp, cfg.generation(), backend, lexicon),
                  {EmbeddingCache(backend.dimension()), {}},
                  {},
                  {},
                  EntailmentGraph(tp.canonicalized(), lexicon)};
  const std::vector<TypedPredicate> preds(run.generated.predicates.begin(),
                                          run.generated.predicates.end());
  run.embedded = embed_predicates(preds, tp, backend, lexicon);
  run.selected = select_edges(preds, run.embedded.cache, head, cfg.k_edge,
                              cfg.workers);
  run.weighted = weigh_edges(run.selected, tp, backend, lexicon);
  run.graph = build_graph(tp, preds, run.weighted.edges,
                          lexicon);
  return run;
}

}  // namespace egg
