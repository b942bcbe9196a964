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

#include "egg/cli.hpp"

#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "egg/error.hpp"
#include "egg/pipeline.hpp"
#include "json.hpp"

namespace egg {

namespace {

namespace fs = std::filesystem;

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

std::ofstream open_out(const fs::path& path) {
  ensure_parent(path);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kUsage, "cannot write " + path.string());
  return f;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return kExitUsage;
    case ErrorKind::kBackend: return kExitBackend;
    case ErrorKind::kFormat:
    case ErrorKind::kLogic: return kExitFormat;
  }
  return kExitUsage;
}

struct Globals {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string log_level = "warn";
};

struct Context {
  PipelineConfig cfg;
  std::unique_ptr<Lexicon> own_lexicon;
  const Lexicon* lexicon = &Lexicon::builtin();
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::unique_ptr<Backend> backend() const {
    return make_backend(cfg.backend_url, cfg.seed, cfg.embed_dim,
                        cfg.backend_timeout_ms, cfg.backend_max_in_flight);
  }
};

Context make_context(const Globals& g, std::ostream& out, std::ostream& err) {
  std::vector<std::string> overrides = g.overrides;
  if (g.seed) overrides.push_back("seed=" + std::to_string(*g.seed));
  if (!g.backend.empty()) overrides.push_back("backend.url=" + g.backend);
  Context ctx;
  ctx.cfg = load_config(g.config_file.empty()
                            ? std::nullopt
                            : std::optional<fs::path>(g.config_file),
                        overrides);
  if (!ctx.cfg.lexicon_path.empty()) {
    ctx.own_lexicon =
        std::make_unique<Lexicon>(Lexicon::load(ctx.cfg.lexicon_path));
    ctx.lexicon = ctx.own_lexicon.get();
  }
  ctx.out = &out;
  ctx.err = &err;
  return ctx;
}

std::vector<LabeledPair> pick_split(std::vector<LabeledPair> pairs,
                                    const std::string& split) {
  if (split == "all") return pairs;
  return filter_split(pairs, split == "valid" ? Split::kValid : Split::kTest);
}

int cmd_generate(Context& c, const std::string& seeds_path,
                 const std::string& out_path, const std::string& trace_path) {
  const auto seed_list = read_predicate_file(seeds_path);
  const std::set<TypedPredicate> seeds(seed_list.begin(), seed_list.end());
  const TypePair tp = shared_letter_map(seed_list, c.cfg.types);
  auto backend = c.backend();
  const auto r = expand(seeds, tp, c.cfg.generation(), *backend, *c.lexicon);
  for (const auto& w : r.warnings) *c.err << "warning: " << w << '\n';
  write_predicate_file(out_path, r.predicates);
  if (!trace_path.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : r.stages) {
      nlohmann::json rec;
      rec["stage"] = s.stage;
      rec["queries"] = s.queries;
      for (const auto& p : s.frontier) rec["frontier"].push_back(p.text());
      rec["promoted"] = nlohmann::json::array();
      for (const auto& p : s.promoted) rec["promoted"].push_back(p.text());
      j.push_back(rec);
    }
    open_out(trace_path) << j.dump(2) << '\n';
  }
  *c.out << "predicates " << r.predicates.size() << " stages "
         << r.stages.size() << (r.aborted ? " aborted" : "") << '\n';
  return r.aborted ? kExitBackend : kExitOk;
}

int cmd_embed(Context& c, const std::string& preds_path,
              const std::string& out_path) {
  const auto preds = read_predicate_file(preds_path);
  const TypePair tp = shared_letter_map(preds, c.cfg.types);
  auto backend = c.backend();
  const auto r = embed_predicates(preds, tp, *backend, *c.lexicon);
  for (const auto& p : r.skipped) {
    *c.err << "warning: not renderable, skipped: " << p.text() << '\n';
  }
  r.cache.save(out_path);
  *c.out << "embedded " << r.cache.size() << '\n';
  return kExitOk;
}

int cmd_select(Context& c, const std::string& preds_path,
               const std::string& emb_path, const std::string& head_path,
               const std::string& out_path) {
  const auto preds = read_predicate_file(preds_path);
  const auto cache = EmbeddingCache::load(emb_path);
  const SphereHead head =
      head_path.empty() ? default_head(c.cfg) : load_head(head_path);
  const auto edges =
      select_edges(preds, cache, head, c.cfg.k_edge, c.cfg.workers);
  auto f = open_out(out_path);
  write_edge_stream(f, edges);
  *c.out << "selected " << edges.size() << '\n';
  return kExitOk;
}

int cmd_weigh(Context& c, const std::string& edges_path,
              const std::string& out_path) {
  const auto selected = read_edge_stream(edges_path);
  if (selected.empty()) {
    open_out(out_path);
    *c.out << "weighted 0 failed 0\n";
    return kExitOk;
  }
  std::vector<TypedPredicate> ends;
  for (const auto& e : selected) ends.push_back(e.src);
  const TypePair tp = shared_letter_map(ends, c.cfg.types);
  auto backend = c.backend();
  const auto r = weigh_edges(selected, tp, *backend, *c.lexicon);
  for (const auto& f : r.failures) {
    *c.err << "warning: pair " << f.index << " failed: " << f.reason << '\n';
  }
  auto f = open_out(out_path);
  write_edge_stream(f, r.edges);
  *c.out << "weighted " << r.edges.size() << " failed " << r.failures.size()
         << '\n';
  return r.edges.empty() ? kExitBackend : kExitOk;
}

int cmd_build(Context& c, const std::string& preds_path,
              const std::string& edges_path, const std::string& out_path) {
  const auto preds = read_predicate_file(preds_path);
  const auto edges = read_edge_stream(edges_path);
  const TypePair tp = shared_letter_map(preds, c.cfg.types);
  const auto g = build_graph(tp, preds, edges, *c.lexicon);
  save_graph(g, out_path);
  *c.out << "graph " << g.predicates().size() << " predicates "
         << g.edge_count() << " edges\n";
  return kExitOk;
}

int cmd_eval(Context& c, const std::string& graphs_path,
             const std::string& dataset_path, const std::string& split,
             const std::string& report_path, const std::string& curves) {
  GraphCollection graphs;
  if (fs::is_directory(graphs_path)) {
    graphs = GraphCollection::load_dir(graphs_path, *c.lexicon);
  } else {
    graphs.insert(load_graph(graphs_path, *c.lexicon));
  }
  const auto pairs = pick_split(load_dataset(dataset_path), split);
  const auto r = evaluate(graphs, pairs, c.cfg.strategies(), c.cfg.floor(),
                          c.cfg.workers, *c.lexicon);
  if (report_path.empty()) {
    *c.out << r.to_json() << '\n';
  } else {
    open_out(report_path) << r.to_json() << '\n';
    *c.out << "auc_pr " << r.auc_pr << " auc_roc " << r.auc_roc << '\n';
  }
  if (!curves.empty()) {
    write_curve_csv(r.pr, curves + "_pr.csv");
    write_curve_csv(r.roc, curves + "_roc.csv");
  }
  return kExitOk;
}

int cmd_train(Context& c, const std::string& dataset_path,
              const std::string& split, const std::string& out_path) {
  const auto pairs = pick_split(load_dataset(dataset_path), split);
  auto backend = c.backend();
  const auto r = train_selector(pairs, c.cfg, *backend, *c.lexicon);
  save_head(r.head, out_path);
  const auto& best = r.history.at(static_cast<std::size_t>(r.best_epoch));
  *c.out << "best_epoch " << r.best_epoch << " valid_f1 " << best.valid_f1
         << " valid_loss " << best.valid_loss << " epochs "
         << r.history.size() - 1 << '\n';
  return kExitOk;
}

int cmd_audit(Context& c, const std::string& graph_path, double eps,
              std::size_t dim, std::size_t trials) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ConfigError("--eps", "must be in (0, 1)");
  }
  if (!graph_path.empty()) {
    const auto g = load_graph(graph_path, *c.lexicon);
    const auto v = g.soft_transitivity_violations(eps);
    for (const auto& t : v) {
      *c.err << t.a.text() << " -> " << t.b.text() << " -> " << t.c.text()
             << " " << format_weight(t.w_ab) << " " << format_weight(t.w_bc)
             << " " << format_weight(t.w_ac) << '\n';
    }
    *c.out << "violations " << v.size() << '\n';
    return kExitOk;
  }
  const auto r = transitivity_audit_constructed(dim, eps, trials, c.cfg.seed);
  *c.out << "trials " << r.trials << " qualifying " << r.qualifying
         << " violations " << r.violations << '\n';
  return kExitOk;
}

int cmd_export(Context& c, const std::string& dataset_path,
               const std::string& split, const std::string& target,
               const std::string& out_path) {
  const auto pairs = pick_split(load_dataset(dataset_path), split);
  const auto t = target == "generator" ? FinetuneTarget::kGenerator
                                       : FinetuneTarget::kWeigher;
  const auto s = export_finetune_data(pairs, t, out_path, *c.lexicon);
  *c.out << "records " << s.records << " skipped " << s.skipped << '\n';
  return kExitOk;
}

int cmd_serve(Context& c, const std::string& host, int port) {
  MockBackend backend(c.cfg.seed, c.cfg.embed_dim);
  BackendServer server(backend, host, port);
  *c.out << "listening on " << host << ":" << server.port() << std::endl;
  server.listen();
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Typed entailment graph construction toolkit", "egg"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_file, "JSON config file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override a config key: key=value");
  app.add_option("--seed", g.seed, "Override the seed");
  app.add_option("--backend", g.backend, "\"mock\" or an http:// URL");
  app.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::function<int(Context&)> action;
  auto sub = [&](const char* name, const char* desc) {
    return app.add_subcommand(name, desc);
  };

  std::string in1, in2, in3, outp, trace, split, target, host = "127.0.0.1";
  double eps = 0.9;
  std::size_t dim = 16, trials = 100000;
  int port = 8080;

  auto* gen = sub("generate", "Expand seed predicates through the generator");
  gen->add_option("--seeds", in1)->required()->check(CLI::ExistingFile);
  gen->add_option("--out", outp)->required();
  gen->add_option("--trace", trace, "Per-stage JSON trace");
  gen->callback([&] {
    action = [&](Context& c) { return cmd_generate(c, in1, outp, trace); };
  });

  auto* emb = sub("embed", "Embed predicate sentences into a cache");
  emb->add_option("--predicates", in1)->required()->check(CLI::ExistingFile);
  emb->add_option("--out", outp)->required();
  emb->callback([&] {
    action = [&](Context& c) { return cmd_embed(c, in1, outp); };
  });

  auto* sel = sub("select", "Pick candidate edges with the sphere selector");
  sel->add_option("--predicates", in1)->required()->check(CLI::ExistingFile);
  sel->add_option("--embeddings", in2)->required()->check(CLI::ExistingFile);
  sel->add_option("--head", in3, "Selector checkpoint")
      ->check(CLI::ExistingFile);
  sel->add_option("--out", outp)->required();
  sel->callback([&] {
    action = [&](Context& c) { return cmd_select(c, in1, in2, in3, outp); };
  });

  auto* wei = sub("weigh", "Score selected edges with the entailment model");
  wei->add_option("--edges", in1)->required()->check(CLI::ExistingFile);
  wei->add_option("--out", outp)->required();
  wei->callback([&] {
    action = [&](Context& c) { return cmd_weigh(c, in1, outp); };
  });

  auto* bld = sub("build", "Assemble a graph file");
  bld->add_option("--predicates", in1)->required()->check(CLI::ExistingFile);
  bld->add_option("--edges", in2)->required()->check(CLI::ExistingFile);
  bld->add_option("--out", outp)->required();
  bld->callback([&] {
    action = [&](Context& c) { return cmd_build(c, in1, in2, outp); };
  });

  const auto splits = CLI::IsMember({"all", "valid", "test"});
  auto* ev = sub("eval", "Score a labeled dataset against graphs");
  ev->add_option("--graphs", in1, "Graph file or directory")
      ->required()
      ->check(CLI::ExistingPath);
  ev->add_option("--dataset", in2)->required()->check(CLI::ExistingFile);
  ev->add_option("--split", split, "all|valid|test")
      ->default_val("test")
      ->check(splits);
  ev->add_option("--report", outp, "JSON report path (default: stdout)");
  ev->add_option("--curves", in3, "Write <prefix>_pr.csv and <prefix>_roc.csv");
  ev->callback([&] {
    action = [&](Context& c) { return cmd_eval(c, in1, in2, split, outp, in3); };
  });

  auto* tr = sub("train-selector", "Train the sphere selector head");
  tr->add_option("--dataset", in1)->required()->check(CLI::ExistingFile);
  tr->add_option("--split", split)->default_val("valid")->check(splits);
  tr->add_option("--out", outp)->required();
  tr->callback([&] {
    action = [&](Context& c) { return cmd_train(c, in1, split, outp); };
  });

  auto* au = sub("audit", "Check the soft transitivity bound");
  au->add_option("--graph", in1, "Audit a graph instead of random spheres")
      ->check(CLI::ExistingFile);
  au->add_option("--eps", eps)->default_val(0.9);
  au->add_option("--dim", dim)->default_val(16)->check(CLI::PositiveNumber);
  au->add_option("--trials", trials)->default_val(100000);
  au->callback([&] {
    action = [&](Context& c) { return cmd_audit(c, in1, eps, dim, trials); };
  });

  auto* ex = sub("export-finetune", "Write fine-tuning records");
  ex->add_option("--dataset", in1)->required()->check(CLI::ExistingFile);
  ex->add_option("--split", split)->default_val("valid")->check(splits);
  ex->add_option("--target", target)
      ->required()
      ->check(CLI::IsMember({"generator", "weigher"}));
  ex->add_option("--out", outp)->required();
  ex->callback([&] {
    action = [&](Context& c) {
      return cmd_export(c, in1, split, target, outp);
    };
  });

  auto* sv = sub("mock-serve", "Serve the mock backend over HTTP");
  sv->add_option("--host", host)->default_val("127.0.0.1");
  sv->add_option("--port", port, "0 picks a free port")
      ->default_val(8080)
      ->check(CLI::Range(0, 65535));
  sv->callback([&] {
    action = [&](Context& c) { return cmd_serve(c, host, port); };
  });

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("egg");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(g.log_level));
  try {
    if (!outp.empty()) ensure_parent(outp);
    Context ctx = make_context(g, out, err);
    return action(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace egg
