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

#ifndef EGG_GRAPH_HPP_
#define EGG_GRAPH_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "egg/lexicon.hpp"
#include "egg/predicate.hpp"

namespace egg {

struct WeightedEdge {
  TypedPredicate src;
  TypedPredicate dst;
  double weight = 0.0;

  bool operator==(const WeightedEdge&) const = default;
};

enum class Direction { kOut, kIn };

struct Neighbor {
  TypedPredicate predicate;
  double weight = 0.0;
};

struct TransitivityViolation {
  TypedPredicate a, b, c;
  double w_ab = 0.0, w_bc = 0.0, w_ac = 0.0;
};

// One typed entailment graph. Immutable after build_graph; queries are
// read-only and safe to run concurrently.
class EntailmentGraph {
 public:
  explicit EntailmentGraph(TypePair type_pair,
                           const Lexicon& lexicon = Lexicon::builtin());

  const TypePair& type_pair() const noexcept { return type_pair_; }
  const std::set<TypedPredicate>& predicates() const noexcept {
    return predicates_;
  }
  bool contains(const TypedPredicate& p) const {
    return predicates_.contains(p);
  }
  std::size_t edge_count() const noexcept { return edge_count_; }
  // Sorted by (src, dst).
  std::vector<WeightedEdge> edges() const;

  // Exact match first; when relaxed, falls back to any stored pair whose
  // rendered sentences equal those of (p, q), taking the largest weight.
  std::optional<double> lookup(const TypedPredicate& p, const TypedPredicate& q,
                               bool relaxed) const;

  // Stored predicates rendering to the same sentence as p (p itself
  // included when stored). Canonical order.
  std::vector<TypedPredicate> sentence_matches(const TypedPredicate& p) const;

  // Top-k by weight, descending; ties in canonical order.
  std::vector<Neighbor> neighbors(const TypedPredicate& p, Direction dir,
                                  std::size_t k) const;

  // Two-edge paths a->b->c with both weights above eps where
  // W_ab * W_bc > W_ac (missing W_ac counts as 0).
  std::vector<TransitivityViolation> soft_transitivity_violations(
      double eps) const;

  bool operator==(const EntailmentGraph& o) const {
    return type_pair_ == o.type_pair_ && predicates_ == o.predicates_ &&
           out_ == o.out_;
  }

 private:
  friend EntailmentGraph build_graph(const TypePair&,
                                     std::span<const TypedPredicate>,
                                     std::span<const WeightedEdge>,
                                     const Lexicon&);
  std::optional<std::string> sentence_of(const TypedPredicate& p) const;

  TypePair type_pair_;
  const Lexicon* lexicon_;
  std::set<TypedPredicate> predicates_;
  std::map<TypedPredicate, std::map<TypedPredicate, double>> out_;
  std::map<TypedPredicate, std::map<TypedPredicate, double>> in_;
  std::unordered_map<std::string, std::vector<TypedPredicate>> by_sentence_;
  std::size_t edge_count_ = 0;
};

// Throws EndpointMissing for edges whose ends are not in `predicates`, and
// DegenerateData for self-loops or weights outside [0, 1]. A repeated
// (src, dst) keeps the last weight and logs a warning.
EntailmentGraph build_graph(const TypePair& tp,
                            std::span<const TypedPredicate> predicates,
                            std::span<const WeightedEdge> edges,
                            const Lexicon& lexicon = Lexicon::builtin());

// Shortest decimal that reads back to the same double.
std::string format_weight(double w);

// Text form: "#EGG\t1", "T\t<t1>\t<t2>", sorted "P\t<pred>" lines, sorted
// "E\t<src>\t<dst>\t<weight>" lines, "#END\t<n_pred>\t<n_edge>".
std::string serialize(const EntailmentGraph& g);
// Throws FormatError with the offending line number.
EntailmentGraph deserialize(std::string_view text,
                            const std::string& source = "<graph>",
                            const Lexicon& lexicon = Lexicon::builtin());

void save_graph(const EntailmentGraph& g, const std::filesystem::path& path);
EntailmentGraph load_graph(const std::filesystem::path& path,
                           const Lexicon& lexicon = Lexicon::builtin());

// Edge stream: the "E" lines alone.
void write_edge_stream(std::ostream& out, std::span<const WeightedEdge> edges);
std::vector<WeightedEdge> read_edge_stream(const std::filesystem::path& path);

// Graphs keyed by canonical type pair.
class GraphCollection {
 public:
  // False (and no change) when a graph for that type pair already exists.
  bool insert(EntailmentGraph g);
  // Looks up by the canonical form of tp.
  const EntailmentGraph* find(const TypePair& tp) const;
  std::size_t size() const noexcept { return graphs_.size(); }
  const std::map<TypePair, EntailmentGraph>& graphs() const { return graphs_; }

  // Every *.egg file in dir, in file-name order.
  static GraphCollection load_dir(const std::filesystem::path& dir,
                                  const Lexicon& lexicon = Lexicon::builtin());
  // One "<t1>__<t2>.egg" file per graph.
  void save_dir(const std::filesystem::path& dir) const;

 private:
  std::map<TypePair, EntailmentGraph> graphs_;
};

// A predicate found in a sentence together with the surface text of its
// slot-1 and slot-2 arguments.
struct ExtractedPredicate {
  TypedPredicate predicate;
  std::string arg1;
  std::string arg2;
};

struct AugmentedPair {
  std::string premise;
  std::string hypothesis;
};

// Appends up to k_nbr replacement sentences per matched predicate: premise
// predicates are replaced by their heaviest out-neighbors, hypothesis
// predicates by their heaviest in-neighbors. Pieces are joined with "; ".
AugmentedPair augment_rte_input(std::string_view premise,
                                std::string_view hypothesis,
                                std::span<const ExtractedPredicate> premise_preds,
                                std::span<const ExtractedPredicate> hyp_preds,
                                const GraphCollection& graphs,
                                std::size_t k_nbr,
                                const Lexicon& lexicon = Lexicon::builtin());

}  // namespace egg

#endif  // EGG_GRAPH_HPP_
