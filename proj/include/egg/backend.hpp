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

#ifndef EGG_BACKEND_HPP_
#define EGG_BACKEND_HPP_

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "egg/parallel.hpp"

namespace egg {

// Fill-in marker placed in generation prompts. Servers map it to their
// model-specific mask token.
inline constexpr std::string_view kFillMarker = "<FILL>";

struct GenRequest {
  std::string prompt;
  int beam = 50;
  int num_return = 50;
  int max_fill_tokens = 5;

  // Throws SchemaViolation: exactly one fill marker, 1 <= num_return <= beam,
  // max_fill_tokens >= 1.
  void validate() const;
};

struct GenResponse {
  std::vector<std::string> sequences;  // most probable first
};

struct EmbedResponse {
  std::vector<double> vector;
};

struct ScoreResponse {
  std::array<double, 3> logits{};  // entailment, neutral, contradiction
};

using SentencePair = std::pair<std::string, std::string>;

// Client for the three inference capabilities.
//
// The public calls validate requests and responses; implementations supply
// the raw do_* hooks. Implementations must be safe to call from several
// threads at once. Batch calls run up to max_in_flight() requests
// concurrently and return results in submission order.
class Backend {
 public:
  explicit Backend(std::size_t dimension) : dimension_(dimension) {}
  virtual ~Backend() = default;
  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  GenResponse generate(const GenRequest& req);
  EmbedResponse embed(std::string_view sentence);
  ScoreResponse score(std::string_view premise, std::string_view hypothesis);

  std::vector<Outcome<GenResponse>> try_generate_batch(
      std::span<const GenRequest> reqs);
  std::vector<Outcome<EmbedResponse>> try_embed_batch(
      std::span<const std::string> sentences);
  std::vector<Outcome<ScoreResponse>> try_score_batch(
      std::span<const SentencePair> pairs);

  std::vector<GenResponse> generate_batch(std::span<const GenRequest> reqs) {
    return unwrap_all(try_generate_batch(reqs));
  }
  std::vector<EmbedResponse> embed_batch(std::span<const std::string> s) {
    return unwrap_all(try_embed_batch(s));
  }
  std::vector<ScoreResponse> score_batch(std::span<const SentencePair> p) {
    return unwrap_all(try_score_batch(p));
  }

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t max_in_flight() const noexcept { return max_in_flight_; }
  void set_max_in_flight(std::size_t n) { max_in_flight_ = n ? n : 1; }

 protected:
  virtual std::vector<std::string> do_generate(const GenRequest& req) = 0;
  virtual std::vector<double> do_embed(const std::string& sentence) = 0;
  virtual std::vector<double> do_score(const std::string& premise,
                                       const std::string& hypothesis) = 0;

 private:
  std::size_t dimension_;
  std::size_t max_in_flight_ = 4;
};

// Whitespace tokens of a generated fill after removing sentinel tokens such
// as "<extra_id_0>" and surrounding punctuation.
std::vector<std::string> fill_tokens(std::string_view fill);

// Deterministic offline backend. Every output is a pure function of
// (seed, inputs):
//  - generate samples distinct verb phrases from a small fixed grammar, so
//    phrases repeat across prompts;
//  - embed returns a unit vector built from hashed token vectors plus a
//    sentence-specific component;
//  - score favours entailment by token containment and makes E strictly
//    maximal for identical sentences.
class MockBackend : public Backend {
 public:
  MockBackend(std::uint64_t seed, std::size_t dimension = 768);

  static const std::vector<std::string>& phrase_pool();

 protected:
  std::vector<std::string> do_generate(const GenRequest& req) override;
  std::vector<double> do_embed(const std::string& sentence) override;
  std::vector<double> do_score(const std::string& premise,
                               const std::string& hypothesis) override;

 private:
  std::uint64_t seed_;
};

// Replays recorded generation outputs keyed by exact prompt; unknown prompts
// yield no sequences. Embedding and scoring delegate to a MockBackend.
class ScriptedBackend : public Backend {
 public:
  ScriptedBackend(std::map<std::string, std::vector<std::string>> script,
                  std::uint64_t seed = 0, std::size_t dimension = 768);

  // JSON object {"<prompt>": ["fill", ...], ...}
  static std::map<std::string, std::vector<std::string>> parse_script(
      std::string_view json_text);

  std::size_t calls() const noexcept { return calls_; }

 protected:
  std::vector<std::string> do_generate(const GenRequest& req) override;
  std::vector<double> do_embed(const std::string& sentence) override;
  std::vector<double> do_score(const std::string& premise,
                               const std::string& hypothesis) override;

 private:
  std::map<std::string, std::vector<std::string>> script_;
  MockBackend mock_;
  std::atomic<std::size_t> calls_{0};
};

// JSON-over-HTTP client for the /generate, /embed and /score endpoints.
class HttpBackend : public Backend {
 public:
  // base_url like "http://127.0.0.1:8080".
  HttpBackend(std::string base_url, std::size_t dimension,
              int timeout_ms = 30000);

 protected:
  std::vector<std::string> do_generate(const GenRequest& req) override;
  std::vector<double> do_embed(const std::string& sentence) override;
  std::vector<double> do_score(const std::string& premise,
                               const std::string& hypothesis) override;

 private:
  std::string post(const std::string& path, const std::string& body);

  std::string host_;
  int port_ = 80;
  int timeout_ms_;
};

// Serves `backend` over the wire protocol until stop() is called on the
// returned handle. Port 0 picks a free port.
class BackendServer {
 public:
  BackendServer(Backend& backend, std::string host, int port);
  ~BackendServer();
  BackendServer(const BackendServer&) = delete;
  BackendServer& operator=(const BackendServer&) = delete;

  int port() const noexcept { return port_; }
  // Blocks until stop().
  void listen();
  // Starts listening on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

// "mock" -> MockBackend, "http://..." -> HttpBackend.
std::unique_ptr<Backend> make_backend(const std::string& url,
                                      std::uint64_t seed,
                                      std::size_t dimension, int timeout_ms,
                                      std::size_t max_in_flight);

// Stable 64-bit FNV-1a hash, used to derive mock outputs.
std::uint64_t stable_hash(std::string_view data,
                          std::uint64_t basis = 0xcbf29ce484222325ULL);

// SplitMix64 step; portable across standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

}  // namespace egg

#endif  // EGG_BACKEND_HPP_
