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

#ifndef EGG_GENERATOR_HPP_
#define EGG_GENERATOR_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "egg/backend.hpp"
#include "egg/lexicon.hpp"
#include "egg/predicate.hpp"

namespace egg {

struct GenerationConfig {
  std::size_t max_predicates = 5000;  // stop once the set grows past this
  int beam = 50;
  int num_return = 50;
  int max_fill_tokens = 5;

  // Throws ConfigError naming the offending key.
  void validate() const;
};

enum class Orientation { kAB, kBA };

struct PromptPair {
  std::string ab;  // "..., which entails that <First> A <FILL> <Second> B."
  std::string ba;  // "..., which entails that <Second> B <FILL> <First> A."
};

PromptPair build_prompts(const TypedPredicate& p, const TypePair& tp,
                         const Lexicon& lexicon = Lexicon::builtin());

// Frames each fill between the two arguments in the given orientation and
// maps the sentence back to a predicate. Unresolvable fills are dropped.
std::set<TypedPredicate> resolve_outputs(
    const std::vector<std::string>& fills, Orientation orientation,
    const TypePair& tp, const Lexicon& lexicon = Lexicon::builtin());

struct StageRecord {
  std::size_t stage = 0;  // 1-based
  std::vector<TypedPredicate> frontier;
  std::vector<TypedPredicate> promoted;
  std::size_t queries = 0;
};

struct ExpandResult {
  std::set<TypedPredicate> predicates;
  std::vector<StageRecord> stages;
  // Number of frontier sentences whose resolved outputs contained each
  // generated predicate, over the whole run.
  std::map<TypedPredicate, std::size_t> source_counts;
  bool aborted = false;
  std::vector<std::string> warnings;
};

// Iterative predicate expansion from seeds.
//
// Each stage renders the frontier, queries both prompt orientations per
// sentence and keeps only predicates produced from at least two distinct
// sentences (tracked with a parity set that persists across stages).
// Stops at a fixpoint or once the accumulated set exceeds
// cfg.max_predicates. A backend failure abandons the running stage and
// returns the last completed set with aborted = true.
ExpandResult expand(const std::set<TypedPredicate>& seeds, const TypePair& tp,
                    const GenerationConfig& cfg, Backend& backend,
                    const Lexicon& lexicon = Lexicon::builtin());

// One canonical predicate per line; blank lines and '#' comments skipped.
std::vector<TypedPredicate> read_predicate_file(
    const std::filesystem::path& path);
void write_predicate_file(const std::filesystem::path& path,
                          const std::set<TypedPredicate>& predicates);

}  // namespace egg

#endif  // EGG_GENERATOR_HPP_
