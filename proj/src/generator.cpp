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

#include "egg/generator.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include <spdlog/spdlog.h>

#include "egg/error.hpp"
#include "egg/surface.hpp"

namespace egg {

void GenerationConfig::validate() const {
  if (max_predicates < 1) {
    throw ConfigError("generate.max_predicates", "must be positive");
  }
  if (beam < 1) throw ConfigError("generate.beam", "must be positive");
  if (num_return < 1) {
    throw ConfigError("generate.num_return", "must be positive");
  }
  if (num_return > beam) {
    throw ConfigError("generate.num_return", "must not exceed generate.beam");
  }
  if (max_fill_tokens < 1) {
    throw ConfigError("generate.max_fill_tokens", "must be positive");
  }
}

PromptPair build_prompts(const TypedPredicate& p, const TypePair& tp,
                         const Lexicon& lexicon) {
  const std::string s = render_sentence(p, tp, lexicon).text;
  const std::string a = argument_phrase(tp.first(), 'A');
  const std::string b = argument_phrase(tp.second(), 'B');
  const std::string head = s + ", which entails that ";
  const std::string fill(kFillMarker);
  return {head + a + " " + fill + " " + b + ".",
          head + b + " " + fill + " " + a + "."};
}

std::set<TypedPredicate> resolve_outputs(const std::vector<std::string>& fills,
                                         Orientation orientation,
                                         const TypePair& tp,
                                         const Lexicon& lexicon) {
  const std::string a = argument_phrase(tp.first(), 'A');
  const std::string b = argument_phrase(tp.second(), 'B');
  const std::string& left = orientation == Orientation::kAB ? a : b;
  const std::string& right = orientation == Orientation::kAB ? b : a;
  std::set<TypedPredicate> out;
  for (const auto& fill : fills) {
    auto p = resolve_sentence(left + " " + fill + " " + right + ".", tp,
                              lexicon);
    if (p) out.insert(std::move(*p));
  }
  return out;
}

namespace {

std::set<TypedPredicate> set_minus(const std::set<TypedPredicate>& a,
                                   const std::set<TypedPredicate>& b) {
  std::set<TypedPredicate> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

}  // namespace

ExpandResult expand(const std::set<TypedPredicate>& seeds, const TypePair& tp,
                    const GenerationConfig& cfg, Backend& backend,
                    const Lexicon& lexicon) {
  cfg.validate();
  if (seeds.empty()) throw DegenerateData("no seed predicates");
  for (const auto& s : seeds) slot_letters(s, tp);  // throws on type mismatch

  ExpandResult result;
  std::set<TypedPredicate> once;
  std::set<TypedPredicate> frontier = seeds;
  std::set<TypedPredicate> accumulated = seeds;

  while (accumulated.size() <= cfg.max_predicates) {
    StageRecord record;
    record.stage = result.stages.size() + 1;

    // Frontier in canonical order; sentences rendering identically are
    // queried once.
    std::vector<std::string> sentences;
    std::vector<GenRequest> requests;
    for (const auto& p : frontier) {
      PromptPair prompts;
      try {
        prompts = build_prompts(p, tp, lexicon);
      } catch (const UnsupportedShape& e) {
        result.warnings.push_back("skipping unrenderable predicate " +
                                  p.text());
        spdlog::warn("{}", result.warnings.back());
        continue;
      }
      if (std::find(sentences.begin(), sentences.end(), prompts.ab) !=
          sentences.end()) {
        continue;
      }
      record.frontier.push_back(p);
      sentences.push_back(prompts.ab);
      requests.push_back({prompts.ab, cfg.beam, cfg.num_return,
                          cfg.max_fill_tokens});
      requests.push_back({prompts.ba, cfg.beam, cfg.num_return,
                          cfg.max_fill_tokens});
    }
    record.queries = requests.size();

    auto outcomes = backend.try_generate_batch(requests);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i].ok()) continue;
      std::string why = "unknown error";
      try {
        std::rethrow_exception(outcomes[i].error);
      } catch (const std::exception& e) {
        why = e.what();
      }
      result.aborted = true;
      result.warnings.push_back("stage " + std::to_string(record.stage) +
                                " aborted: " + why);
      spdlog::warn("{}", result.warnings.back());
      result.predicates = accumulated;
      return result;
    }

    std::set<TypedPredicate> next;
    for (std::size_t k = 0; k < sentences.size(); ++k) {
      const auto& ab = outcomes[2 * k].value->sequences;
      const auto& ba = outcomes[2 * k + 1].value->sequences;
      std::set<TypedPredicate> generated =
          resolve_outputs(ab, Orientation::kAB, tp, lexicon);
      generated.merge(resolve_outputs(ba, Orientation::kBA, tp, lexicon));
      for (const auto& g : generated) ++result.source_counts[g];

      generated = set_minus(generated, accumulated);
      for (const auto& g : generated) {
        if (once.contains(g)) next.insert(g);
      }
      // Parity update: symmetric difference with this sentence's outputs.
      for (const auto& g : generated) {
        if (!once.erase(g)) once.insert(g);
      }
    }
    next = set_minus(next, accumulated);
    record.promoted.assign(next.begin(), next.end());
    result.stages.push_back(std::move(record));
    if (next.empty()) break;
    accumulated.insert(next.begin(), next.end());
    frontier = std::move(next);
  }
  result.predicates = std::move(accumulated);
  return result;
}

std::vector<TypedPredicate> read_predicate_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  std::vector<TypedPredicate> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      out.push_back(parse_predicate(t));
    } catch (const MalformedPredicate& e) {
      throw FormatError(path.string(), n, e.what());
    }
  }
  return out;
}

void write_predicate_file(const std::filesystem::path& path,
                          const std::set<TypedPredicate>& predicates) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), 0, "cannot write file");
  for (const auto& p : predicates) out << p.text() << '\n';
}

}  // namespace egg
