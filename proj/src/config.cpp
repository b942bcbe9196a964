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

#include "egg/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <type_traits>
#include <variant>

#include "egg/error.hpp"
#include "json.hpp"

namespace egg {

using nlohmann::json;

namespace {

// std::uint64_t and std::size_t coincide on most targets.
using Seed = std::conditional_t<std::is_same_v<std::uint64_t, std::size_t>,
                                std::monostate*, std::uint64_t*>;
using Field = std::variant<Seed, std::size_t*, int*, double*, bool*,
                           std::string*>;

std::map<std::string, Field> fields(PipelineConfig& c) {
  return {
      {"seed", &c.seed},
      {"workers", &c.workers},
      {"lexicon.path", &c.lexicon_path},
      {"backend.url", &c.backend_url},
      {"backend.timeout_ms", &c.backend_timeout_ms},
      {"backend.max_in_flight", &c.backend_max_in_flight},
      {"generate.max_predicates", &c.max_predicates},
      {"generate.beam", &c.beam},
      {"generate.num_return", &c.num_return},
      {"generate.max_fill_tokens", &c.max_fill_tokens},
      {"generate.types", &c.types},
      {"selector.embed_dim", &c.embed_dim},
      {"selector.center_dim", &c.center_dim},
      {"selector.hidden_dim", &c.hidden_dim},
      {"selector.f_plus", &c.f_plus},
      {"selector.k_edge", &c.k_edge},
      {"selector.learning_rate", &c.learning_rate},
      {"selector.weight_decay", &c.weight_decay},
      {"selector.positive_repeat", &c.positive_repeat},
      {"selector.patience", &c.patience},
      {"selector.max_epochs", &c.max_epochs},
      {"selector.batch_size", &c.batch_size},
      {"selector.holdout_fraction", &c.holdout_fraction},
      {"eval.relaxed_match", &c.relaxed_match},
      {"eval.lemma_backup", &c.lemma_backup},
      {"eval.average_backup", &c.average_backup},
      {"eval.precision_floor", &c.precision_floor},
      {"rte.k_nbr", &c.k_nbr},
  };
}

void assign(const std::string& key, Field f, const json& v) {
  auto bad = [&](const char* want) {
    return ConfigError(key, std::string("expected ") + want + ", got " +
                                v.dump());
  };
  std::visit(
      [&](auto* target) {
        using T = std::remove_pointer_t<decltype(target)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          // unreachable placeholder alternative
        } else if constexpr (std::is_same_v<T, bool>) {
          if (!v.is_boolean()) throw bad("a boolean");
          *target = v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
          if (!v.is_string()) throw bad("a string");
          *target = v.get<std::string>();
        } else if constexpr (std::is_same_v<T, double>) {
          if (!v.is_number()) throw bad("a number");
          *target = v.get<double>();
        } else if constexpr (std::is_same_v<T, int>) {
          if (!v.is_number_integer()) throw bad("an integer");
          *target = v.get<int>();
        } else {
          if (!v.is_number_unsigned()) throw bad("a non-negative integer");
          *target = v.get<T>();
        }
      },
      f);
}

}  // namespace

std::vector<std::string> PipelineConfig::keys() {
  PipelineConfig c;
  std::vector<std::string> out;
  for (const auto& [k, f] : fields(c)) out.push_back(k);
  return out;
}

void PipelineConfig::apply_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError("<file>", e.what());
  }
  if (!j.is_object()) throw ConfigError("<file>", "expected a JSON object");
  auto table = fields(*this);
  for (const auto& [k, v] : j.items()) {
    auto it = table.find(k);
    if (it == table.end()) throw ConfigError(k, "unknown key");
    assign(k, it->second, v);
  }
}

void PipelineConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(std::string(assignment), "expected key=value");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string raw = trim(assignment.substr(eq + 1));
  auto table = fields(*this);
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  json v;
  if (std::holds_alternative<std::string*>(it->second)) {
    v = raw;
  } else {
    try {
      v = json::parse(raw);
    } catch (const json::exception&) {
      throw ConfigError(key, "cannot parse value '" + raw + "'");
    }
  }
  assign(key, it->second, v);
}

void PipelineConfig::validate() const {
  auto positive = [](const char* key, auto v) {
    if (v <= 0) throw ConfigError(key, "must be positive");
  };
  positive("workers", workers);
  positive("backend.timeout_ms", backend_timeout_ms);
  positive("backend.max_in_flight", backend_max_in_flight);
  positive("selector.embed_dim", embed_dim);
  positive("selector.center_dim", center_dim);
  positive("selector.hidden_dim", hidden_dim);
  positive("selector.k_edge", k_edge);
  positive("rte.k_nbr", k_nbr);
  generation().validate();
  selector_training().validate();
  radius_map();
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("selector.holdout_fraction", "must be in [0, 1)");
  }
  if (!(precision_floor >= 0.0 && precision_floor <= 1.0)) {
    throw ConfigError("eval.precision_floor", "must be in [0, 1]");
  }
  if (backend_url != "mock" && !backend_url.starts_with("http://")) {
    throw ConfigError("backend.url", "expected \"mock\" or an http:// URL");
  }
  if (!types.empty()) {
    const auto comma = types.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("generate.types", "expected \"t1,t2\"");
    }
    try {
      ArgType(trim(std::string_view(types).substr(0, comma)));
      ArgType(trim(std::string_view(types).substr(comma + 1)));
    } catch (const MalformedPredicate& e) {
      throw ConfigError("generate.types", e.what());
    }
  }
}

std::string PipelineConfig::dump() const {
  PipelineConfig copy = *this;
  json j = json::object();
  for (const auto& [k, f] : fields(copy)) {
    std::visit(
        [&](auto* p) {
          if constexpr (!std::is_same_v<std::remove_pointer_t<decltype(p)>,
                                        std::monostate>) {
            j[k] = *p;
          }
        },
        f);
  }
  return j.dump(2);
}

GenerationConfig PipelineConfig::generation() const {
  GenerationConfig g;
  g.max_predicates = max_predicates;
  g.beam = beam;
  g.num_return = num_return;
  g.max_fill_tokens = max_fill_tokens;
  return g;
}

SelectorTrainConfig PipelineConfig::selector_training() const {
  SelectorTrainConfig s;
  s.learning_rate = learning_rate;
  s.weight_decay = weight_decay;
  s.positive_repeat = positive_repeat;
  s.patience = patience;
  s.max_epochs = max_epochs;
  s.batch_size = batch_size;
  s.seed = seed;
  return s;
}

HeadDims PipelineConfig::head_dims() const {
  return {embed_dim, hidden_dim, center_dim};
}

RadiusMap PipelineConfig::radius_map() const { return parse_radius_map(f_plus); }

ScoringStrategies PipelineConfig::strategies() const {
  return {relaxed_match, lemma_backup, average_backup};
}

std::optional<double> PipelineConfig::floor() const {
  if (precision_floor <= 0.0) return std::nullopt;
  return precision_floor;
}

PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                           const std::vector<std::string>& overrides) {
  PipelineConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("--config", "cannot open " + file->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    c.apply_json(ss.str());
  }
  for (const auto& o : overrides) c.apply_override(o);
  c.validate();
  return c;
}

}  // namespace egg
