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

#include "egg/backend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "egg/error.hpp"
#include "egg/predicate.hpp"
#include "egg/surface.hpp"
#include "json.hpp"

namespace egg {

namespace {

std::uint64_t mix(std::uint64_t seed, std::string_view tag,
                  std::string_view a, std::string_view b = {}) {
  std::uint64_t h = stable_hash(tag, stable_hash(std::to_string(seed)));
  h = stable_hash("\x1f", h);
  h = stable_hash(a, h);
  h = stable_hash("\x1f", h);
  return stable_hash(b, h);
}

std::vector<std::string> content_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& w : split_words(to_lower(text))) {
    std::string t;
    for (char c : w) {
      if (std::isalnum(static_cast<unsigned char>(c))) t += c;
    }
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

std::uint64_t stable_hash(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

void GenRequest::validate() const {
  auto first = prompt.find(kFillMarker);
  if (first == std::string::npos ||
      prompt.find(kFillMarker, first + 1) != std::string::npos) {
    throw SchemaViolation("prompt must contain exactly one " +
                          std::string(kFillMarker) + " marker");
  }
  if (beam < 1) throw SchemaViolation("beam must be positive");
  if (num_return < 1) throw SchemaViolation("num_return must be positive");
  if (num_return > beam) throw SchemaViolation("num_return exceeds beam");
  if (max_fill_tokens < 1) {
    throw SchemaViolation("max_fill_tokens must be positive");
  }
}

std::vector<std::string> fill_tokens(std::string_view fill) {
  std::vector<std::string> out;
  for (auto& w : split_words(fill)) {
    if (w.size() >= 2 && w.front() == '<' && w.back() == '>') continue;
    out.push_back(std::move(w));
  }
  while (!out.empty()) {
    auto& last = out.back();
    while (!last.empty() && (last.back() == '.' || last.back() == ',')) {
      last.pop_back();
    }
    if (!last.empty()) break;
    out.pop_back();
  }
  return out;
}

GenResponse Backend::generate(const GenRequest& req) {
  req.validate();
  auto raw = do_generate(req);
  if (raw.size() > static_cast<std::size_t>(req.num_return)) {
    throw SchemaViolation("backend returned " + std::to_string(raw.size()) +
                          " sequences for num_return=" +
                          std::to_string(req.num_return));
  }
  GenResponse out;
  out.sequences.reserve(raw.size());
  for (auto& s : raw) {
    auto toks = fill_tokens(s);
    if (toks.size() > static_cast<std::size_t>(req.max_fill_tokens)) {
      spdlog::warn("truncating overlong fill '{}' to {} tokens", s,
                   req.max_fill_tokens);
      toks.resize(static_cast<std::size_t>(req.max_fill_tokens));
    }
    out.sequences.push_back(join(toks, " "));
  }
  return out;
}

EmbedResponse Backend::embed(std::string_view sentence) {
  if (sentence.empty()) throw SchemaViolation("empty sentence");
  EmbedResponse out{do_embed(std::string(sentence))};
  if (out.vector.size() != dimension_) {
    throw SchemaViolation("embedding has " + std::to_string(out.vector.size()) +
                          " components, expected " +
                          std::to_string(dimension_));
  }
  if (!all_finite(out.vector)) throw SchemaViolation("non-finite embedding");
  return out;
}

ScoreResponse Backend::score(std::string_view premise,
                             std::string_view hypothesis) {
  if (premise.empty() || hypothesis.empty()) {
    throw SchemaViolation("empty premise or hypothesis");
  }
  auto raw = do_score(std::string(premise), std::string(hypothesis));
  if (raw.size() != 3) {
    throw SchemaViolation("expected 3 logits, got " +
                          std::to_string(raw.size()));
  }
  if (!all_finite(raw)) throw SchemaViolation("non-finite logits");
  return ScoreResponse{{raw[0], raw[1], raw[2]}};
}

std::vector<Outcome<GenResponse>> Backend::try_generate_batch(
    std::span<const GenRequest> reqs) {
  return parallel_map(reqs.size(), max_in_flight_,
                      [&](std::size_t i) { return generate(reqs[i]); });
}

std::vector<Outcome<EmbedResponse>> Backend::try_embed_batch(
    std::span<const std::string> sentences) {
  return parallel_map(sentences.size(), max_in_flight_,
                      [&](std::size_t i) { return embed(sentences[i]); });
}

std::vector<Outcome<ScoreResponse>> Backend::try_score_batch(
    std::span<const SentencePair> pairs) {
  return parallel_map(pairs.size(), max_in_flight_, [&](std::size_t i) {
    return score(pairs[i].first, pairs[i].second);
  });
}

// --- MockBackend -----------------------------------------------------------

MockBackend::MockBackend(std::uint64_t seed, std::size_t dimension)
    : Backend(dimension), seed_(seed) {}

const std::vector<std::string>& MockBackend::phrase_pool() {
  static const std::vector<std::string> kPool = {
      "is connected with", "recognizes",       "is drawn to",
      "is associated with", "identifies with", "knows",
      "supports",          "is related to",    "adores",
      "trusts",            "works for",        "is part of",
      "is magnet for",     "believes in",      "depends on",
      "is loyal to",       "leads",            "opposes",
      "is funded by",      "controls",         "is elected in",
      "visits",            "praises",          "is attracted to",
      "xyzzy plugh",       "the the",
  };
  return kPool;
}

std::vector<std::string> MockBackend::do_generate(const GenRequest& req) {
  const auto& pool = phrase_pool();
  SplitMix64 rng(mix(seed_, "generate", req.prompt));
  std::size_t want = 4 + rng.below(5);
  want = std::min<std::size_t>({want, static_cast<std::size_t>(req.num_return),
                                static_cast<std::size_t>(req.beam),
                                pool.size()});
  std::vector<std::size_t> idx(pool.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < want; ++i) {
    std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.push_back(pool[idx[i]]);
  }
  return out;
}

std::vector<double> MockBackend::do_embed(const std::string& sentence) {
  const std::size_t dim = dimension();
  std::vector<double> v(dim, 0.0);
  auto accumulate = [&](std::uint64_t key, double scale) {
    SplitMix64 rng(key);
    for (auto& x : v) x += scale * (2.0 * rng.uniform() - 1.0);
  };
  for (const auto& tok : content_tokens(sentence)) {
    accumulate(mix(seed_, "token", tok), 1.0);
  }
  accumulate(mix(seed_, "sentence", sentence), 0.5);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
  return v;
}

std::vector<double> MockBackend::do_score(const std::string& premise,
                                          const std::string& hypothesis) {
  if (normalize_sentence(premise) == normalize_sentence(hypothesis)) {
    return {4.0, 0.0, -1.0};
  }
  auto p = content_tokens(premise);
  auto h = content_tokens(hypothesis);
  std::set<std::string> ps(p.begin(), p.end());
  std::set<std::string> hs(h.begin(), h.end());
  std::size_t shared = 0;
  for (const auto& t : hs) shared += ps.count(t);
  const double containment =
      hs.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(hs.size());
  SplitMix64 rng(mix(seed_, "score", premise, hypothesis));
  const double e = 4.0 * containment - 2.5 + (2.0 * rng.uniform() - 1.0);
  const double n = 2.0 * rng.uniform() - 1.0;
  const double c = 2.0 * rng.uniform() - 1.5;
  return {e, n, c};
}

// --- ScriptedBackend -------------------------------------------------------

ScriptedBackend::ScriptedBackend(
    std::map<std::string, std::vector<std::string>> script, std::uint64_t seed,
    std::size_t dimension)
    : Backend(dimension), script_(std::move(script)), mock_(seed, dimension) {}

std::map<std::string, std::vector<std::string>> ScriptedBackend::parse_script(
    std::string_view json_text) {
  std::map<std::string, std::vector<std::string>> out;
  try {
    auto j = nlohmann::json::parse(json_text);
    for (auto& [prompt, fills] : j.items()) {
      out[prompt] = fills.get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("<script>", 0, e.what());
  }
  return out;
}

std::vector<std::string> ScriptedBackend::do_generate(const GenRequest& req) {
  ++calls_;
  auto it = script_.find(req.prompt);
  if (it == script_.end()) return {};
  std::vector<std::string> out = it->second;
  if (out.size() > static_cast<std::size_t>(req.num_return)) {
    out.resize(static_cast<std::size_t>(req.num_return));
  }
  return out;
}

std::vector<double> ScriptedBackend::do_embed(const std::string& sentence) {
  return mock_.embed(sentence).vector;
}

std::vector<double> ScriptedBackend::do_score(const std::string& premise,
                                              const std::string& hypothesis) {
  auto r = mock_.score(premise, hypothesis);
  return {r.logits.begin(), r.logits.end()};
}

std::unique_ptr<Backend> make_backend(const std::string& url,
                                      std::uint64_t seed,
                                      std::size_t dimension, int timeout_ms,
                                      std::size_t max_in_flight) {
  std::unique_ptr<Backend> b;
  if (url == "mock") {
    b = std::make_unique<MockBackend>(seed, dimension);
  } else if (url.starts_with("http://")) {
    b = std::make_unique<HttpBackend>(url, dimension, timeout_ms);
  } else {
    throw ConfigError("backend.url", "expected \"mock\" or an http:// URL, got '" +
                                         url + "'");
  }
  b->set_max_in_flight(max_in_flight);
  return b;
}

}  // namespace egg
