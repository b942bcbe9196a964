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

#include <charconv>
#include <thread>

#include <spdlog/spdlog.h>

#include "egg/backend.hpp"
#include "egg/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace egg {

using nlohmann::json;

HttpBackend::HttpBackend(std::string base_url, std::size_t dimension,
                         int timeout_ms)
    : Backend(dimension), timeout_ms_(timeout_ms) {
  constexpr std::string_view kScheme = "http://";
  std::string_view rest(base_url);
  if (!rest.starts_with(kScheme)) {
    throw ConfigError("backend.url", "only http:// URLs are supported");
  }
  rest.remove_prefix(kScheme.size());
  while (rest.ends_with('/')) rest.remove_suffix(1);
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) {
    host_ = std::string(rest);
  } else {
    host_ = std::string(rest.substr(0, colon));
    auto digits = rest.substr(colon + 1);
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), port_);
    if (ec != std::errc() || ptr != digits.data() + digits.size() ||
        port_ <= 0 || port_ > 65535) {
      throw ConfigError("backend.url", "bad port in '" + base_url + "'");
    }
  }
  if (host_.empty()) throw ConfigError("backend.url", "missing host");
}

std::string HttpBackend::post(const std::string& path,
                              const std::string& body) {
  // One client per call keeps the backend shareable across threads.
  httplib::Client cli(host_, port_);
  const auto sec = timeout_ms_ / 1000;
  const auto usec = (timeout_ms_ % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  auto res = cli.Post(path, body, "application/json");
  if (!res) {
    throw BackendUnreachable(host_ + ":" + std::to_string(port_) + path +
                             ": " + httplib::to_string(res.error()));
  }
  if (res->status == 400 || res->status == 422) {
    throw SchemaViolation(path + " rejected request: " + res->body);
  }
  if (res->status != 200) {
    throw BackendUnreachable(path + " returned HTTP " +
                             std::to_string(res->status));
  }
  return res->body;
}

namespace {

json parse_reply(const std::string& body, const char* path) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string(path) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> HttpBackend::do_generate(const GenRequest& req) {
  json body = {{"prompt", req.prompt},
               {"beam", req.beam},
               {"num_return", req.num_return},
               {"max_fill_tokens", req.max_fill_tokens}};
  auto j = parse_reply(post("/generate", body.dump()), "/generate");
  try {
    return j.at("sequences").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("/generate: ") + e.what());
  }
}

std::vector<double> HttpBackend::do_embed(const std::string& sentence) {
  json body = {{"sentence", sentence}};
  auto j = parse_reply(post("/embed", body.dump()), "/embed");
  try {
    return j.at("vector").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("/embed: ") + e.what());
  }
}

std::vector<double> HttpBackend::do_score(const std::string& premise,
                                          const std::string& hypothesis) {
  json body = {{"premise", premise}, {"hypothesis", hypothesis}};
  auto j = parse_reply(post("/score", body.dump()), "/score");
  try {
    return j.at("logits").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw SchemaViolation(std::string("/score: ") + e.what());
  }
}

// --- BackendServer ---------------------------------------------------------

struct BackendServer::Impl {
  Impl(Backend& b, std::string h) : backend(b), host(std::move(h)) {}
  Backend& backend;
  std::string host;
  httplib::Server server;
  std::thread thread;
};

namespace {

template <typename Fn>
void handle(const httplib::Request& req, httplib::Response& res, Fn fn) {
  try {
    auto in = json::parse(req.body);
    json out = fn(in);
    res.set_content(out.dump(), "application/json");
  } catch (const json::exception& e) {
    res.status = 400;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const SchemaViolation& e) {
    res.status = 400;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  } catch (const std::exception& e) {
    res.status = 500;
    res.set_content(json{{"error", e.what()}}.dump(), "application/json");
  }
}

}  // namespace

BackendServer::BackendServer(Backend& backend, std::string host, int port)
    : impl_(std::make_unique<Impl>(backend, std::move(host))) {
  auto& srv = impl_->server;
  Backend& b = impl_->backend;
  srv.Post("/generate", [&b](const httplib::Request& rq,
                             httplib::Response& rs) {
    handle(rq, rs, [&](const json& in) {
      GenRequest g;
      g.prompt = in.at("prompt").get<std::string>();
      g.beam = in.value("beam", g.beam);
      g.num_return = in.value("num_return", g.num_return);
      g.max_fill_tokens = in.value("max_fill_tokens", g.max_fill_tokens);
      return json{{"sequences", b.generate(g).sequences}};
    });
  });
  srv.Post("/embed", [&b](const httplib::Request& rq, httplib::Response& rs) {
    handle(rq, rs, [&](const json& in) {
      return json{
          {"vector", b.embed(in.at("sentence").get<std::string>()).vector}};
    });
  });
  srv.Post("/score", [&b](const httplib::Request& rq, httplib::Response& rs) {
    handle(rq, rs, [&](const json& in) {
      auto r = b.score(in.at("premise").get<std::string>(),
                       in.at("hypothesis").get<std::string>());
      return json{{"logits", r.logits}};
    });
  });
  srv.Get("/healthz", [&b](const httplib::Request&, httplib::Response& rs) {
    rs.set_content(json{{"status", "ok"}, {"dimension", b.dimension()}}.dump(),
                   "application/json");
  });
  if (port == 0) {
    port_ = srv.bind_to_any_port(impl_->host);
  } else {
    port_ = srv.bind_to_port(impl_->host, port) ? port : -1;
  }
  if (port_ < 0) {
    throw ConfigError("serve.port", "cannot bind " + impl_->host + ":" +
                                        std::to_string(port));
  }
}

BackendServer::~BackendServer() { stop(); }

void BackendServer::listen() { impl_->server.listen_after_bind(); }

void BackendServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void BackendServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace egg
