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

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "egg/backend.hpp"
#include "egg/error.hpp"
#include "egg/lexicon.hpp"
#include "egg/surface.hpp"
#include "test_support.hpp"
#include "worked_example.hpp"

namespace egg {
namespace {

const TypePair kPG = TypePair::ordered(ArgType("person"), ArgType("government"));

TEST(LexiconTest, LemmatizeExamples) {
  EXPECT_EQ(lemmatize("adores"), "adore");
  EXPECT_EQ(lemmatize("drawn"), "draw");
  EXPECT_EQ(lemmatize("be"), "be");
  EXPECT_EQ(lemmatize("identified"), "identify");
  EXPECT_EQ(lemmatize("worshipped"), "worship");
  EXPECT_EQ(lemmatize("sought"), "seek");
  EXPECT_EQ(lemmatize("is"), "be");
}

TEST(LexiconTest, PosClassExamples) {
  const auto& lex = Lexicon::builtin();
  EXPECT_EQ(pos_class("with", lex), PosClass::kPreposition);
  EXPECT_EQ(pos_class("elected", lex), PosClass::kPastParticiple);
  EXPECT_EQ(pos_class("quickly", lex), PosClass::kAdverb);
  EXPECT_EQ(pos_class("will", lex), PosClass::kModal);
  EXPECT_EQ(pos_class("the", lex), PosClass::kOther);
}

TEST(LexiconTest, InflectionOfKnownVerbs) {
  const auto& lex = Lexicon::builtin();
  EXPECT_EQ(lex.third_person("adore"), "adores");
  EXPECT_EQ(lex.third_person("identify"), "identifies");
  EXPECT_EQ(lex.past_participle("elect"), "elected");
  EXPECT_EQ(lex.past_participle("draw"), "drawn");
  EXPECT_EQ(lex.past_participle("worship"), "worshipped");
}

TEST(LexiconProperty, LemmatizeIdempotent) {
  const auto& lex = Lexicon::builtin();
  std::vector<std::string> tokens;
  for (const auto& v : lex.verbs()) {
    tokens.push_back(v);
    tokens.push_back(lex.third_person(v));
    tokens.push_back(lex.past_participle(v));
  }
  for (const auto& n : lex.nouns()) tokens.push_back(n);
  SplitMix64 rng(5);
  for (int i = 0; i < 500; ++i) {
    std::string t;
    const auto len = 1 + rng.below(9);
    for (std::uint64_t k = 0; k < len; ++k) t += static_cast<char>('a' + rng.below(26));
    tokens.push_back(t);
    tokens.push_back(t + "ies");
    tokens.push_back(t + "ed");
    tokens.push_back(t + "ing");
  }
  for (const auto& t : tokens) {
    const auto once = lex.lemmatize(t);
    EXPECT_EQ(lex.lemmatize(once), once) << t;
  }
}

TEST(LexiconTest, ParseRejectsMalformedFile) {
  EXPECT_THROW(Lexicon::parse("not a section header\n", "x"), FormatError);
}

TEST(RenderTest, ReferenceExamples) {
  EXPECT_EQ(render_sentence(parse_predicate("(elect.2,elect.in.2,government,time)"),
                            TypePair::ordered(ArgType("government"), ArgType("time")))
                .text,
            "Government A is elected in Time B");
  EXPECT_EQ(render_sentence(parse_predicate("(adore.1,adore.2,person,government)"),
                            kPG)
                .text,
            "Person A adores Government B");
  const auto s = render_sentence(
      parse_predicate("(magnet.1,magnet.for.2,government,person)"), kPG);
  EXPECT_EQ(s.text, "Government B is magnet for Person A");
  EXPECT_EQ(s.slot1_letter, 'B');
  EXPECT_EQ(s.slot2_letter, 'A');
}

TEST(RenderTest, SameTypeLettersDisambiguate) {
  const auto tp = TypePair::canonical(ArgType("thing"), ArgType("thing"));
  EXPECT_EQ(render_sentence(parse_predicate("(eat.1,eat.2,thing,thing)"), tp).text,
            "Thing A eats Thing B");
}

TEST(RenderTest, NegationUsesAuxiliary) {
  EXPECT_EQ(render_sentence(parse_predicate("NEG__(adore.1,adore.2,person,government)"),
                            kPG)
                .text,
            "Person A does not adore Government B");
  EXPECT_EQ(render_sentence(parse_predicate("NEG__(be.1,be.2,person,government)"), kPG)
                .text,
            "Person A is not Government B");
}

TEST(RenderTest, UnsupportedShapes) {
  EXPECT_THROW(render_sentence(parse_predicate("(adore.1,know.2,person,government)"), kPG),
               UnsupportedShape);
  EXPECT_THROW(render_sentence(parse_predicate("(adore.3,adore.2,person,government)"), kPG),
               UnsupportedShape);
  EXPECT_THROW(render_sentence(parse_predicate("(adore.1,adore.2,person,time)"), kPG),
               UnsupportedShape);
}

TEST(RenderTest, ParaphraseCollision) {
  const auto tp = TypePair::ordered(ArgType("thing"), ArgType("event"));
  const auto a = render_sentence(parse_predicate("(use.2,use.in.2,thing,event)"), tp);
  const auto b = render_sentence(parse_predicate("(be.1,be.used.in.2,thing,event)"), tp);
  EXPECT_EQ(a.text, "Thing A is used in Event B");
  EXPECT_EQ(a.text, b.text);
}

TEST(ResolveTest, ReferenceExamples) {
  EXPECT_EQ(resolve_sentence("Person A is identified with Government B.", kPG),
            parse_predicate("(identify.2,identify.with.2,person,government)"));
  EXPECT_EQ(resolve_sentence("Person A identifies with Government B.", kPG),
            parse_predicate("(identify.1,identify.with.2,person,government)"));
  EXPECT_EQ(resolve_sentence("Government B is drawn to Person A.", kPG),
            parse_predicate("(draw.2,draw.to.2,government,person)"));
  EXPECT_EQ(resolve_sentence("Person A the the Government B.", kPG), std::nullopt);
}

TEST(ResolveTest, NegationModalsAndAuxiliaries) {
  EXPECT_EQ(resolve_sentence("Person A does not adore Government B.", kPG),
            parse_predicate("NEG__(adore.1,adore.2,person,government)"));
  EXPECT_EQ(resolve_sentence("Person A doesn't adore Government B.", kPG),
            parse_predicate("NEG__(adore.1,adore.2,person,government)"));
  EXPECT_EQ(resolve_sentence("Person A will adore Government B.", kPG),
            parse_predicate("(adore.1,adore.2,person,government)"));
  EXPECT_EQ(resolve_sentence("Person A has been elected in Government B.", kPG),
            parse_predicate("(elect.2,elect.in.2,person,government)"));
  EXPECT_EQ(resolve_sentence("Person A has to obey Government B.", kPG),
            parse_predicate("(obey.1,obey.2,person,government)"));
}

TEST(ResolveTest, MissingPlaceholders) {
  EXPECT_EQ(resolve_sentence("Person A adores Person B.", kPG), std::nullopt);
  EXPECT_EQ(resolve_sentence("adores", kPG), std::nullopt);
  EXPECT_EQ(resolve_sentence("", kPG), std::nullopt);
}

using testing::golden_rows;

TEST(SurfaceGolden, ResolverMatchesWorkedExample) {
  const auto rows = golden_rows();
  ASSERT_EQ(rows.size(), 33u);
  std::set<TypedPredicate> distinct;
  for (const auto& r : rows) {
    EXPECT_EQ(resolve_sentence(r.sentence, kPG), r.tuple) << r.sentence;
    if (r.tuple) distinct.insert(*r.tuple);
  }
  EXPECT_EQ(distinct.size(), 32u);
}

TEST(SurfaceGolden, RoundTripOfWorkedExamplePredicates) {
  std::ifstream in(testing::data_path("worked_example_stages.txt"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto p = parse_predicate(line.substr(line.find('\t') + 1));
    EXPECT_EQ(resolve_sentence(render_sentence(p, kPG).text, kPG), p) << p.text();
    EXPECT_EQ(resolve_sentence(render_sentence(p, kPG.swapped()).text,
                               kPG.swapped()),
              p)
        << p.text();
    ++n;
  }
  EXPECT_EQ(n, 17u);
}

TEST(SurfaceProperty, RoundTripOverResolvedGoldenCorpus) {
  // Every tuple the resolver emits lies in the renderable shape table, with
  // and without negation.
  for (const auto& r : golden_rows()) {
    if (!r.tuple) continue;
    const auto neg = parse_predicate(std::string(kNegationPrefix) + r.tuple->text());
    for (const auto& p : {*r.tuple, neg}) {
      const auto s = render_sentence(p, kPG);
      EXPECT_EQ(resolve_sentence(s.text, kPG), p) << s.text;
      EXPECT_EQ(resolve_sentence(s.text + ".", kPG), p) << s.text;
    }
  }
}

TEST(SurfaceProperty, ResolverIsTotal) {
  SplitMix64 rng(77);
  const std::vector<std::string> vocab = {
      "Person", "A", "Government", "B", "is", "not", "the", "with", "has", "been",
      "to", "will", "adores", "n't", "drawn", ".", ",", "", "<FILL>", "never",
      "cannot", "quickly", "be", "have", "doesn't"};
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    const auto len = rng.below(9);
    for (std::uint64_t k = 0; k < len; ++k) s += vocab[rng.below(vocab.size())] + " ";
    if (rng.below(2)) s = "Person A " + s + " Government B";
    EXPECT_NO_THROW(resolve_sentence(s, kPG)) << s;
  }
}

TEST(SurfaceTest, NormalizeSentence) {
  EXPECT_EQ(normalize_sentence("  Person A   adores Government B.  "),
            "Person A adores Government B");
}

}  // namespace
}  // namespace egg
