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

#ifndef EGG_CONFIG_HPP_
#define EGG_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "egg/evalkit.hpp"
#include "egg/generator.hpp"
#include "egg/selector.hpp"

namespace egg {

// All tunables of the pipeline under flat dotted keys, e.g.
// "generate.max_predicates" or "selector.f_plus".
struct PipelineConfig {
  std::uint64_t seed = 0;
  std::size_t workers = 4;
  std::string lexicon_path;  // empty: built-in lexicon

  std::string backend_url = "mock";
  int backend_timeout_ms = 30000;
  std::size_t backend_max_in_flight = 4;

  std::size_t max_predicates = 5000;
  int beam = 50;
  int num_return = 50;
  int max_fill_tokens = 5;
  std::string types;  // "t1,t2": letter order; empty: lexicographic

  std::size_t embed_dim = 768;
  std::size_t center_dim = 16;
  std::size_t hidden_dim = 16;
  std::string f_plus = "exp";
  std::size_t k_edge = 20000000;

  double learning_rate = 5e-4;
  double weight_decay = 0.01;
  int positive_repeat = 5;
  int patience = 10;
  int max_epochs = 200;
  std::size_t batch_size = 32;
  double holdout_fraction = 0.2;

  bool relaxed_match = true;
  bool lemma_backup = true;
  bool average_backup = true;
  double precision_floor = 0.0;  // 0: whole curve

  std::size_t k_nbr = 5;

  // Reads a JSON object of dotted keys. Unknown keys and ill-typed values
  // throw ConfigError naming the key.
  void apply_json(std::string_view json_text);
  // "key=value" with the value parsed according to the key's type.
  void apply_override(std::string_view assignment);
  // Throws ConfigError naming the first invalid key.
  void validate() const;
  // Every key with its current value, as a JSON object.
  std::string dump() const;

  static std::vector<std::string> keys();

  GenerationConfig generation() const;
  SelectorTrainConfig selector_training() const;
  HeadDims head_dims() const;
  RadiusMap radius_map() const;
  ScoringStrategies strategies() const;
  std::optional<double> floor() const;
};

// Defaults, then the optional file, then overrides in order; validated.
PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                           const std::vector<std::string>& overrides);

}  // namespace egg

#endif  // EGG_CONFIG_HPP_
