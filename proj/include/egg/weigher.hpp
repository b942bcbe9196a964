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

#ifndef EGG_WEIGHER_HPP_
#define EGG_WEIGHER_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "egg/backend.hpp"
#include "egg/graph.hpp"
#include "egg/lexicon.hpp"
#include "egg/predicate.hpp"

namespace egg {

// Class probabilities of an (E, N, C) logit triple, computed after
// subtracting the largest logit.
std::array<double, 3> softmax3(const std::array<double, 3>& logits);

// Probability of the entailment class.
double entailment_weight(const std::array<double, 3>& logits);

// Scores S(p) -> S(q) with the backend. Throws UnsupportedShape when either
// predicate cannot be rendered under tp; backend errors propagate.
double edge_weight(const TypedPredicate& p, const TypedPredicate& q,
                   const TypePair& tp, Backend& backend,
                   const Lexicon& lexicon = Lexicon::builtin());

using PredicatePair = std::pair<TypedPredicate, TypedPredicate>;

struct EdgeFailure {
  std::size_t index = 0;  // position in the input list
  std::string reason;
};

struct ScoredEdges {
  std::vector<WeightedEdge> edges;  // input order, failed pairs omitted
  std::vector<EdgeFailure> failures;
};

// Weighs each pair independently; requests run concurrently up to the
// backend's in-flight limit. Failed pairs get no edge.
ScoredEdges score_edges(std::span<const PredicatePair> pairs,
                        const TypePair& tp, Backend& backend,
                        const Lexicon& lexicon = Lexicon::builtin());

}  // namespace egg

#endif  // EGG_WEIGHER_HPP_
