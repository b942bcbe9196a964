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

#include "egg/evalkit.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "egg/error.hpp"
#include "egg/generator.hpp"
#include "egg/parallel.hpp"
#include "egg/surface.hpp"
#include "egg/weigher.hpp"
#include "json.hpp"

namespace egg {

std::string_view to_string(Split s) {
  return s == Split::kValid ? "valid" : "test";
}

std::vector<LabeledPair> parse_dataset(std::string_view text,
                                       const std::string& source) {
  std::vector<LabeledPair> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      f.push_back(trim(std::string_view(line).substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 3 && f.size() != 4) {
      throw FormatError(source, n, "expected 3 or 4 tab-separated fields");
    }
    bool label;
    if (f[2] == "True") {
      label = true;
    } else if (f[2] == "False") {
      label = false;
    } else {
      throw FormatError(source, n, "label must be True or False, got '" +
                                       f[2] + "'");
    }
    Split split = Split::kTest;
    if (f.size() == 4) {
      if (f[3] == "valid") {
        split = Split::kValid;
      } else if (f[3] != "test") {
        throw FormatError(source, n, "split must be valid or test, got '" +
                                         f[3] + "'");
      }
    }
    try {
      auto p = parse_predicate(f[0]);
      auto q = parse_predicate(f[1]);
      if (type_pair_of(p) != type_pair_of(q)) {
        throw FormatError(source, n, "premise and hypothesis types differ");
      }
      out.push_back({std::move(p), std::move(q), label, split});
    } catch (const MalformedPredicate& e) {
      throw FormatError(source, n, e.what());
    }
  }
  return out;
}

std::vector<LabeledPair> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str(), path.string());
}

DatasetCounts count_pairs(std::span<const LabeledPair> pairs) {
  DatasetCounts c;
  for (const auto& p : pairs) {
    ++c.total;
    (p.split == Split::kValid ? c.valid : c.test) += 1;
    (p.label ? c.positive : c.negative) += 1;
  }
  return c;
}

std::vector<LabeledPair> filter_split(std::span<const LabeledPair> pairs,
                                      Split split) {
  std::vector<LabeledPair> out;
  for (const auto& p : pairs) {
    if (p.split == split) out.push_back(p);
  }
  return out;
}

// --- pair scoring ----------------------------------------------------------

namespace {

std::vector<std::string> lemmas(const std::vector<std::string>& words,
                                const Lexicon& lexicon) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(lexicon.lemmatize(w));
  return out;
}

std::optional<double> lookup_in(const EntailmentGraph& g,
                                const TypedPredicate& p,
                                const TypedPredicate& q, bool relaxed) {
  return g.lookup(p, q, relaxed);
}

// Weight of the pair in a graph of other types, trying both ways of
// mapping the pair's types onto the graph's.
std::optional<double> transferred_weight(const EntailmentGraph& g,
                                         const LabeledPair& pair,
                                         bool relaxed) {
  const TypePair own = type_pair_of(pair.premise);
  const ArgType& x = g.type_pair().first();
  const ArgType& y = g.type_pair().second();
  for (int swap = 0; swap < 2; ++swap) {
    const ArgType& to_first = swap ? y : x;
    const ArgType& to_second = swap ? x : y;
    auto retype = [&](const TypedPredicate& p) {
      if (own.same_type()) return p.with_types(to_first, to_second);
      auto map = [&](const ArgType& t) {
        return t == own.first() ? to_first : to_second;
      };
      return p.with_types(map(p.type1()), map(p.type2()));
    };
    if (auto w = lookup_in(g, retype(pair.premise), retype(pair.hypothesis),
                           relaxed)) {
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

bool lemma_equivalent(const TypedPredicate& p, const TypedPredicate& q,
                      const Lexicon& lexicon) {
  return p.negated() == q.negated() && p.type1() == q.type1() &&
         p.type2() == q.type2() && p.slot1().index == q.slot1().index &&
         p.slot2().index == q.slot2().index &&
         lemmas(p.slot1().words, lexicon) == lemmas(q.slot1().words, lexicon) &&
         lemmas(p.slot2().words, lexicon) == lemmas(q.slot2().words, lexicon);
}

PairScore score_pair(const GraphCollection& graphs, const LabeledPair& pair,
                     const ScoringStrategies& strategies,
                     const Lexicon& lexicon) {
  const TypePair own = type_pair_of(pair.premise);
  if (const auto* g = graphs.find(own)) {
    if (auto w = g->lookup(pair.premise, pair.hypothesis,
                           strategies.relaxed_match)) {
      return {*w, ScoreSource::kGraph};
    }
  }
  if (strategies.lemma_backup &&
      lemma_equivalent(pair.premise, pair.hypothesis, lexicon)) {
    return {1.0, ScoreSource::kLemma};
  }
  if (strategies.average_backup) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [tp, g] : graphs.graphs()) {
      if (tp == own.canonicalized()) continue;
      if (auto w = transferred_weight(g, pair, strategies.relaxed_match)) {
        sum += *w;
        ++n;
      }
    }
    if (n > 0) return {sum / static_cast<double>(n), ScoreSource::kAverage};
  }
  return {0.0, ScoreSource::kMissing};
}

std::vector<PairScore> score_pairs(const GraphCollection& graphs,
                                   std::span<const LabeledPair> pairs,
                                   const ScoringStrategies& strategies,
                                   std::size_t workers,
                                   const Lexicon& lexicon) {
  return unwrap_all(parallel_map(pairs.size(), workers, [&](std::size_t i) {
    return score_pair(graphs, pairs[i], strategies, lexicon);
  }));
}

// --- curves ----------------------------------------------------------------

namespace {

struct Step {
  std::size_t tp = 0;
  std::size_t fp = 0;
};

// Cumulative (tp, fp) after accepting each group of equal scores, highest
// score first.
std::vector<Step> sweep(std::span<const double> scores,
                        const std::vector<bool>& labels, std::size_t& pos,
                        std::size_t& neg) {
  if (scores.size() != labels.size()) {
    throw DimensionMismatch(scores.size(), labels.size());
  }
  pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw DegenerateLabels("curves need at least one positive and one negative");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<Step> steps;
  Step cur;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (labels[order[k]]) {
      ++cur.tp;
    } else {
      ++cur.fp;
    }
    const bool group_end = k + 1 == order.size() ||
                           scores[order[k + 1]] != scores[order[k]];
    if (group_end) steps.push_back(cur);
  }
  return steps;
}

}  // namespace

Curve pr_curve(std::span<const double> scores, const std::vector<bool>& labels) {
  std::size_t pos = 0, neg = 0;
  const auto steps = sweep(scores, labels, pos, neg);
  Curve c{CurveKind::kPR, {}};
  auto precision = [](const Step& s) {
    return static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
  };
  c.points.emplace_back(0.0, precision(steps.front()));
  for (const auto& s : steps) {
    c.points.emplace_back(static_cast<double>(s.tp) / static_cast<double>(pos),
                          precision(s));
  }
  return c;
}

Curve roc_curve(std::span<const double> scores,
                const std::vector<bool>& labels) {
  std::size_t pos = 0, neg = 0;
  const auto steps = sweep(scores, labels, pos, neg);
  Curve c{CurveKind::kROC, {}};
  c.points.emplace_back(0.0, 0.0);
  for (const auto& s : steps) {
    c.points.emplace_back(static_cast<double>(s.fp) / static_cast<double>(neg),
                          static_cast<double>(s.tp) / static_cast<double>(pos));
  }
  return c;
}

double auc(const Curve& curve, std::optional<double> floor) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    auto [x0, y0] = curve.points[i - 1];
    auto [x1, y1] = curve.points[i];
    const double dx = x1 - x0;
    if (dx <= 0.0) continue;
    if (!floor) {
      area += 0.5 * dx * (y0 + y1);
      continue;
    }
    const double f = *floor;
    const bool in0 = y0 >= f;
    const bool in1 = y1 >= f;
    if (in0 && in1) {
      area += 0.5 * dx * (y0 + y1);
    } else if (in0 != in1) {
      // Keep the part of the segment on the floor's upper side.
      const double t = (f - y0) / (y1 - y0);
      const double xc = x0 + t * dx;
      if (in0) {
        area += 0.5 * (xc - x0) * (y0 + f);
      } else {
        area += 0.5 * (x1 - xc) * (f + y1);
      }
    }
  }
  return area;
}

std::array<double, 3> ensemble_mean(const std::array<double, 3>& a,
                                    const std::array<double, 3>& b) {
  const auto pa = softmax3(a);
  const auto pb = softmax3(b);
  return {(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0,
          (pa[2] + pb[2]) / 2.0};
}

// --- exports ---------------------------------------------------------------

ExportStats export_finetune_data(std::span<const LabeledPair> pairs,
                                 FinetuneTarget target,
                                 const std::filesystem::path& out_path,
                                 const Lexicon& lexicon) {
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw FormatError(out_path.string(), 0, "cannot write file");
  ExportStats stats;
  for (const auto& pair : pairs) {
    if (target == FinetuneTarget::kGenerator && !pair.label) continue;
    const TypePair tp = type_pair_of(pair.premise);
    try {
      if (target == FinetuneTarget::kGenerator) {
        std::vector<nlohmann::json> records;
        for (const TypePair& letters : {tp, tp.swapped()}) {
          const auto prompts = build_prompts(pair.premise, letters, lexicon);
          const auto [l1, l2] = slot_letters(pair.hypothesis, letters);
          records.push_back(
              {{"prompt", l1 == 'A' ? prompts.ab : prompts.ba},
               {"fill", relation_phrase(pair.hypothesis, lexicon)}});
        }
        for (const auto& r : records) out << r.dump() << '\n';
        stats.records += records.size();
      } else {
        nlohmann::json r = {
            {"premise", render_sentence(pair.premise, tp, lexicon).text},
            {"hypothesis", render_sentence(pair.hypothesis, tp, lexicon).text},
            {"label", pair.label ? "entailment" : "neutral"}};
        out << r.dump() << '\n';
        ++stats.records;
      }
    } catch (const UnsupportedShape&) {
      ++stats.skipped;
    }
  }
  return stats;
}

void write_curve_csv(const Curve& curve, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), 0, "cannot write file");
  out << "x,y\n";
  for (const auto& [x, y] : curve.points) {
    out << format_weight(x) << ',' << format_weight(y) << '\n';
  }
}

}  // namespace egg
