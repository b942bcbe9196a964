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

#include "egg/weigher.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "egg/error.hpp"
#include "egg/surface.hpp"

namespace egg {

std::array<double, 3> softmax3(const std::array<double, 3>& logits) {
  const double m = std::max({logits[0], logits[1], logits[2]});
  std::array<double, 3> e{};
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    e[i] = std::exp(logits[i] - m);
    sum += e[i];
  }
  for (auto& x : e) x /= sum;
  return e;
}

double entailment_weight(const std::array<double, 3>& logits) {
  return softmax3(logits)[0];
}

double edge_weight(const TypedPredicate& p, const TypedPredicate& q,
                   const TypePair& tp, Backend& backend,
                   const Lexicon& lexicon) {
  const auto sp = render_sentence(p, tp, lexicon).text;
  const auto sq = render_sentence(q, tp, lexicon).text;
  return entailment_weight(backend.score(sp, sq).logits);
}

ScoredEdges score_edges(std::span<const PredicatePair> pairs,
                        const TypePair& tp, Backend& backend,
                        const Lexicon& lexicon) {
  ScoredEdges out;
  std::vector<SentencePair> requests;
  std::vector<std::size_t> origin;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      requests.emplace_back(render_sentence(pairs[i].first, tp, lexicon).text,
                            render_sentence(pairs[i].second, tp, lexicon).text);
      origin.push_back(i);
    } catch (const std::exception& e) {
      out.failures.push_back({i, e.what()});
    }
  }
  auto outcomes = backend.try_score_batch(requests);
  // Merge rendering and backend failures back into input order.
  std::vector<std::optional<double>> weight(pairs.size());
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].ok()) {
      weight[origin[k]] = entailment_weight(outcomes[k].value->logits);
      continue;
    }
    try {
      std::rethrow_exception(outcomes[k].error);
    } catch (const std::exception& e) {
      out.failures.push_back({origin[k], e.what()});
    }
  }
  std::sort(out.failures.begin(), out.failures.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (weight[i]) {
      out.edges.push_back({pairs[i].first, pairs[i].second, *weight[i]});
    }
  }
  return out;
}

}  // namespace egg
