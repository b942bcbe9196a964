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

#include "egg/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "egg/error.hpp"
#include "egg/surface.hpp"

namespace egg {

EntailmentGraph::EntailmentGraph(TypePair type_pair, const Lexicon& lexicon)
    : type_pair_(std::move(type_pair)), lexicon_(&lexicon) {}

std::optional<std::string> EntailmentGraph::sentence_of(
    const TypedPredicate& p) const {
  try {
    return normalize_sentence(render_sentence(p, type_pair_, *lexicon_).text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

EntailmentGraph build_graph(const TypePair& tp,
                            std::span<const TypedPredicate> predicates,
                            std::span<const WeightedEdge> edges,
                            const Lexicon& lexicon) {
  EntailmentGraph g(tp, lexicon);
  g.predicates_.insert(predicates.begin(), predicates.end());
  for (const auto& e : edges) {
    if (!g.predicates_.contains(e.src)) throw EndpointMissing(e.src.text());
    if (!g.predicates_.contains(e.dst)) throw EndpointMissing(e.dst.text());
    if (e.src == e.dst) throw DegenerateData("self-loop on " + e.src.text());
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) {
      throw DegenerateData("edge weight outside [0, 1]: " +
                           std::to_string(e.weight));
    }
    auto [it, inserted] = g.out_[e.src].insert_or_assign(e.dst, e.weight);
    if (!inserted) {
      spdlog::warn("duplicate edge {} -> {}; keeping the last weight",
                   e.src.text(), e.dst.text());
    }
    g.in_[e.dst][e.src] = e.weight;
  }
  for (const auto& [src, row] : g.out_) g.edge_count_ += row.size();
  for (const auto& p : g.predicates_) {
    if (auto s = g.sentence_of(p)) g.by_sentence_[*s].push_back(p);
  }
  return g;
}

std::vector<WeightedEdge> EntailmentGraph::edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count_);
  for (const auto& [src, row] : out_) {
    for (const auto& [dst, w] : row) out.push_back({src, dst, w});
  }
  return out;
}

std::vector<TypedPredicate> EntailmentGraph::sentence_matches(
    const TypedPredicate& p) const {
  auto s = sentence_of(p);
  if (!s) {
    if (predicates_.contains(p)) return {p};
    return {};
  }
  auto it = by_sentence_.find(*s);
  if (it == by_sentence_.end()) return {};
  return it->second;
}

std::optional<double> EntailmentGraph::lookup(const TypedPredicate& p,
                                              const TypedPredicate& q,
                                              bool relaxed) const {
  if (auto row = out_.find(p); row != out_.end()) {
    if (auto it = row->second.find(q); it != row->second.end()) {
      return it->second;
    }
  }
  if (!relaxed) return std::nullopt;
  std::optional<double> best;
  const auto qs = sentence_matches(q);
  for (const auto& pp : sentence_matches(p)) {
    auto row = out_.find(pp);
    if (row == out_.end()) continue;
    for (const auto& qq : qs) {
      auto it = row->second.find(qq);
      if (it != row->second.end() && (!best || it->second > *best)) {
        best = it->second;
      }
    }
  }
  return best;
}

std::vector<Neighbor> EntailmentGraph::neighbors(const TypedPredicate& p,
                                                 Direction dir,
                                                 std::size_t k) const {
  const auto& adj = dir == Direction::kOut ? out_ : in_;
  auto row = adj.find(p);
  if (row == adj.end() || k == 0) return {};
  std::vector<Neighbor> out;
  for (const auto& [q, w] : row->second) out.push_back({q, w});
  // Stable sort keeps canonical order among equal weights.
  std::stable_sort(out.begin(), out.end(),
                   [](const Neighbor& a, const Neighbor& b) {
                     return a.weight > b.weight;
                   });
  if (out.size() > k) out.erase(out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
  return out;
}

std::vector<TransitivityViolation>
EntailmentGraph::soft_transitivity_violations(double eps) const {
  std::vector<TransitivityViolation> out;
  for (const auto& [a, row_a] : out_) {
    for (const auto& [b, w_ab] : row_a) {
      if (w_ab <= eps) continue;
      auto row_b = out_.find(b);
      if (row_b == out_.end()) continue;
      for (const auto& [c, w_bc] : row_b->second) {
        if (w_bc <= eps || c == a) continue;
        auto it = row_a.find(c);
        const double w_ac = it == row_a.end() ? 0.0 : it->second;
        if (w_ab * w_bc > w_ac) out.push_back({a, b, c, w_ab, w_bc, w_ac});
      }
    }
  }
  return out;
}

// --- text format -----------------------------------------------------------

std::string format_weight(double w) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, ptr);
}

namespace {

constexpr std::string_view kHeader = "#EGG\t1";
constexpr std::string_view kEnd = "#END";

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

double parse_weight(const std::string& s, const std::string& src,
                    std::size_t line) {
  double w = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), w);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError(src, line, "bad weight '" + s + "'");
  }
  if (!(w >= 0.0 && w <= 1.0)) {
    throw FormatError(src, line, "weight " + s + " outside [0, 1]");
  }
  return w;
}

std::size_t parse_count(const std::string& s, const std::string& src,
                        std::size_t line) {
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw FormatError(src, line, "bad count '" + s + "'");
  }
  return n;
}

TypedPredicate parse_at(const std::string& s, const std::string& src,
                        std::size_t line) {
  try {
    return parse_predicate(s);
  } catch (const MalformedPredicate& e) {
    throw FormatError(src, line, e.what());
  }
}

}  // namespace

void write_edge_stream(std::ostream& out, std::span<const WeightedEdge> edges) {
  for (const auto& e : edges) {
    out << "E\t" << e.src.text() << '\t' << e.dst.text() << '\t'
        << format_weight(e.weight) << '\n';
  }
}

std::string serialize(const EntailmentGraph& g) {
  std::ostringstream out;
  out << kHeader << '\n';
  out << "T\t" << g.type_pair().first().name() << '\t'
      << g.type_pair().second().name() << '\n';
  for (const auto& p : g.predicates()) out << "P\t" << p.text() << '\n';
  const auto edges = g.edges();
  write_edge_stream(out, edges);
  out << kEnd << '\t' << g.predicates().size() << '\t' << edges.size() << '\n';
  return out.str();
}

EntailmentGraph deserialize(std::string_view text, const std::string& source,
                            const Lexicon& lexicon) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view l = text.substr(start, nl - start);
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    lines.push_back(l);
    start = nl + 1;
  }
  if (lines.empty() || lines[0] != kHeader) {
    throw FormatError(source, 1, "missing '#EGG\\t1' header");
  }
  std::optional<TypePair> tp;
  std::vector<TypedPredicate> preds;
  std::vector<WeightedEdge> edges;
  bool ended = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t n = i + 1;
    if (lines[i].empty()) continue;
    if (ended) throw FormatError(source, n, "content after end marker");
    auto f = split_tabs(lines[i]);
    if (f[0] == "T") {
      if (tp) throw FormatError(source, n, "repeated type line");
      if (f.size() != 3) throw FormatError(source, n, "expected T\\t<t1>\\t<t2>");
      try {
        tp = TypePair::ordered(ArgType(f[1]), ArgType(f[2]));
      } catch (const MalformedPredicate& e) {
        throw FormatError(source, n, e.what());
      }
    } else if (f[0] == "P") {
      if (f.size() != 2) throw FormatError(source, n, "expected P\\t<pred>");
      preds.push_back(parse_at(f[1], source, n));
    } else if (f[0] == "E") {
      if (f.size() != 4) {
        throw FormatError(source, n, "expected E\\t<src>\\t<dst>\\t<weight>");
      }
      edges.push_back({parse_at(f[1], source, n), parse_at(f[2], source, n),
                       parse_weight(f[3], source, n)});
    } else if (f[0] == kEnd) {
      if (f.size() != 3) throw FormatError(source, n, "bad end marker");
      if (parse_count(f[1], source, n) != preds.size() ||
          parse_count(f[2], source, n) != edges.size()) {
        throw FormatError(source, n, "record counts do not match end marker");
      }
      ended = true;
    } else {
      throw FormatError(source, n, "unknown record '" + f[0] + "'");
    }
  }
  if (!tp) throw FormatError(source, lines.size(), "missing type line");
  if (!ended) {
    throw FormatError(source, lines.size(), "truncated: missing end marker");
  }
  std::set<TypedPredicate> known(preds.begin(), preds.end());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    if (!known.contains(e.src) || !known.contains(e.dst)) {
      throw FormatError(source, 0, "edge endpoint not declared: " +
                                       e.src.text() + " -> " + e.dst.text());
    }
    if (e.src == e.dst) {
      throw FormatError(source, 0, "self-loop on " + e.src.text());
    }
  }
  return build_graph(*tp, preds, edges, lexicon);
}

void save_graph(const EntailmentGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), 0, "cannot write file");
  out << serialize(g);
}

EntailmentGraph load_graph(const std::filesystem::path& path,
                           const Lexicon& lexicon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str(), path.string(), lexicon);
}

std::vector<WeightedEdge> read_edge_stream(const std::filesystem::path& path) {
  const std::string src = path.string();
  std::ifstream in(path);
  if (!in) throw FormatError(src, 0, "cannot open file");
  std::vector<WeightedEdge> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f.size() != 4 || f[0] != "E") {
      throw FormatError(src, n, "expected E\\t<src>\\t<dst>\\t<weight>");
    }
    out.push_back({parse_at(f[1], src, n), parse_at(f[2], src, n),
                   parse_weight(f[3], src, n)});
  }
  return out;
}

// --- collection ------------------------------------------------------------

bool GraphCollection::insert(EntailmentGraph g) {
  const TypePair key = g.type_pair().canonicalized();
  return graphs_.emplace(key, std::move(g)).second;
}

const EntailmentGraph* GraphCollection::find(const TypePair& tp) const {
  auto it = graphs_.find(tp.canonicalized());
  return it == graphs_.end() ? nullptr : &it->second;
}

GraphCollection GraphCollection::load_dir(const std::filesystem::path& dir,
                                          const Lexicon& lexicon) {
  if (!std::filesystem::is_directory(dir)) {
    throw FormatError(dir.string(), 0, "not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".egg") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  GraphCollection out;
  for (const auto& f : files) {
    if (!out.insert(load_graph(f, lexicon))) {
      throw FormatError(f.string(), 0, "second graph for the same type pair");
    }
  }
  return out;
}

void GraphCollection::save_dir(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [tp, g] : graphs_) {
    save_graph(g, dir / (tp.first().name() + "__" + tp.second().name() +
                         ".egg"));
  }
}

// --- RTE input augmentation ------------------------------------------------

namespace {

void replace_all(std::string& s, const std::string& from,
                 const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

// Renders `neighbor` with the arguments of `source` filled in.
std::optional<std::string> substitute(const ExtractedPredicate& source,
                                      const TypedPredicate& neighbor,
                                      const TypePair& tp,
                                      const Lexicon& lexicon) {
  try {
    const auto& p = source.predicate;
    auto [l1, l2] = slot_letters(p, tp);
    std::string s = render_sentence(neighbor, tp, lexicon).text;
    // Placeholders are replaced through unique markers so that an argument
    // text containing the other placeholder is left alone.
    const std::string ph1 = argument_phrase(p.type1(), l1);
    const std::string ph2 = argument_phrase(p.type2(), l2);
    replace_all(s, ph1, "\x01");
    replace_all(s, ph2, "\x02");
    replace_all(s, "\x01", source.arg1);
    replace_all(s, "\x02", source.arg2);
    return s;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string augment(std::string_view base,
                    std::span<const ExtractedPredicate> preds, Direction dir,
                    const GraphCollection& graphs, std::size_t k_nbr,
                    const Lexicon& lexicon) {
  std::string out(base);
  for (const auto& ex : preds) {
    const EntailmentGraph* g = graphs.find(type_pair_of(ex.predicate));
    if (!g) continue;
    const auto matches = g->sentence_matches(ex.predicate);
    if (matches.empty()) continue;
    const TypedPredicate& node =
        g->contains(ex.predicate) ? ex.predicate : matches.front();
    for (const auto& nb : g->neighbors(node, dir, k_nbr)) {
      if (auto s = substitute(ex, nb.predicate, g->type_pair(), lexicon)) {
        out += "; ";
        out += *s;
      }
    }
  }
  return out;
}

}  // namespace

AugmentedPair augment_rte_input(std::string_view premise,
                                std::string_view hypothesis,
                                std::span<const ExtractedPredicate> premise_preds,
                                std::span<const ExtractedPredicate> hyp_preds,
                                const GraphCollection& graphs,
                                std::size_t k_nbr, const Lexicon& lexicon) {
  if (k_nbr == 0) throw ConfigError("rte.k_nbr", "must be at least 1");
  return {augment(premise, premise_preds, Direction::kOut, graphs, k_nbr,
                  lexicon),
          augment(hypothesis, hyp_preds, Direction::kIn, graphs, k_nbr,
                  lexicon)};
}

}  // namespace egg
