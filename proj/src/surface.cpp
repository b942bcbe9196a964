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

#include "egg/surface.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

#include "egg/error.hpp"

namespace egg {

namespace {

using Tokens = std::vector<std::string>;

bool is_be_form(std::string_view t) {
  static constexpr std::array<std::string_view, 8> kForms = {
      "be", "is", "are", "was", "were", "am", "been", "being"};
  return std::find(kForms.begin(), kForms.end(), t) != kForms.end();
}

bool is_have_form(std::string_view t) {
  return t == "have" || t == "has" || t == "had";
}

bool is_do_form(std::string_view t) {
  return t == "do" || t == "does" || t == "did";
}

bool is_verb(PosClass c) {
  return c == PosClass::kVerb || c == PosClass::kPastParticiple;
}

std::string strip_punct(std::string_view tok) {
  auto keep = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'' ||
           c == '_' || c == '-';
  };
  std::size_t b = 0, e = tok.size();
  while (b < e && !keep(tok[b])) ++b;
  while (e > b && !keep(tok[e - 1])) --e;
  return std::string(tok.substr(b, e - b));
}

Tokens slice(const Tokens& l, std::size_t from, std::size_t to) {
  return Tokens(l.begin() + static_cast<std::ptrdiff_t>(from),
                l.begin() + static_cast<std::ptrdiff_t>(to));
}

struct Placeholder {
  std::size_t start = 0;
  std::size_t length = 0;
  bool found = false;
};

// Finds "<Title words> <letter>" in the raw (case-preserving) tokens. The
// letter is matched case-sensitively so the article "a" is never taken for
// the argument letter.
Placeholder find_placeholder(const Tokens& raw, const ArgType& type,
                             char letter, std::size_t skip_start,
                             std::size_t skip_len) {
  Tokens title = split_words(to_lower(type.title()));
  const std::string want_letter(1, letter);
  for (std::size_t i = 0; i + title.size() < raw.size(); ++i) {
    if (skip_len && i < skip_start + skip_len &&
        i + title.size() + 1 > skip_start) {
      continue;
    }
    bool match = true;
    for (std::size_t k = 0; k < title.size() && match; ++k) {
      match = to_lower(raw[i + k]) == title[k];
    }
    if (match && raw[i + title.size()] == want_letter) {
      return {i, title.size() + 1, true};
    }
  }
  return {};
}

// Negation detection on the relation tokens. The leading "not"/"n't" form is
// extended to "<auxiliary> not" so that "does not adore" and "is not elected
// in" are recognized; the negation tokens and do-support are removed.
bool strip_negation(Tokens& l, const Lexicon& lex) {
  if (l.empty()) return false;
  auto contracted = [](const std::string& t) {
    return t.size() > 3 && t.ends_with("n't");
  };
  bool neg = false;
  if (l[0] == "not" || l[0] == "never") {
    neg = true;
    l.erase(l.begin());
  } else if (l[0] == "cannot") {
    neg = true;
    l[0] = "can";
  } else if (contracted(l[0])) {
    neg = true;
    std::string base = l[0].substr(0, l[0].size() - 3);
    if (base == "wo") base = "will";
    if (base == "ca") base = "can";
    if (base == "sha") base = "shall";
    l[0] = base;
  } else if (l.size() > 1 && l[1] == "not" &&
             (is_be_form(l[0]) || is_have_form(l[0]) || is_do_form(l[0]) ||
              lex.is_modal(l[0]))) {
    neg = true;
    l.erase(l.begin() + 1);
  }
  if (neg && l.size() > 1 && is_do_form(l[0])) l.erase(l.begin());
  return neg;
}

std::optional<TypedPredicate> make(Tokens w1, int i1, Tokens w2, int i2,
                                   const ArgType& t1, const ArgType& t2,
                                   bool neg) {
  return TypedPredicate(RelSlot{std::move(w1), i1}, RelSlot{std::move(w2), i2},
                        t1, t2, neg);
}

std::optional<TypedPredicate> resolve_tokens(Tokens l, const ArgType& t1,
                                             const ArgType& t2,
                                             const Lexicon& lex) {
  if (l.empty()) return std::nullopt;
  const bool neg = strip_negation(l, lex);

  std::erase_if(l, [&](const std::string& t) { return lex.is_modal(t); });
  if (l.size() > 1 && is_have_form(l[0]) && l[1] == "been") {
    l.erase(l.begin());
  }
  if (l.size() > 1 && is_have_form(l[0]) &&
      lex.pos_class(l[1]) == PosClass::kPastParticiple) {
    l.erase(l.begin());
  }
  if (l.size() > 2 && is_have_form(l[0]) && l[1] == "to") {
    l.erase(l.begin(), l.begin() + 2);
  }
  if (l.empty()) return std::nullopt;

  // Verb head span [head, tail].
  std::ptrdiff_t head = 0;
  std::ptrdiff_t tail = static_cast<std::ptrdiff_t>(l.size()) - 1;
  while (head <= tail && !is_verb(lex.pos_class(l[head]))) ++head;
  while (head <= tail && !is_verb(lex.pos_class(l[tail])) &&
         lex.pos_class(l[tail]) != PosClass::kPreposition) {
    --tail;
  }
  if (head > tail) return std::nullopt;
  Tokens cut = slice(l, static_cast<std::size_t>(head),
                     static_cast<std::size_t>(tail) + 1);

  // "is doing" -> "doing"
  if (cut.size() >= 2 && is_be_form(cut[0]) && cut[1].ends_with("ing") &&
      lex.pos_class(cut[1]) == PosClass::kVerb) {
    cut.erase(cut.begin());
  }

  const std::string lemma = lex.lemmatize(cut[0]);
  auto last_is_prep = [&] {
    return lex.pos_class(cut.back()) == PosClass::kPreposition;
  };

  if (lemma == "be") {
    if (cut.size() == 1) return make({"be"}, 1, {"be"}, 2, t1, t2, neg);
    if (lex.pos_class(cut[1]) == PosClass::kAdverb) {
      cut.erase(cut.begin() + 1);
      if (cut.size() == 1) return make({"be"}, 1, {"be"}, 2, t1, t2, neg);
    }
    const PosClass second = lex.pos_class(cut[1]);
    if (second == PosClass::kPreposition) {
      // Copula + preposition ("is after"): kept as a be-predicate.
      Tokens w2 = cut;
      w2[0] = "be";
      return make({"be"}, 1, std::move(w2), 2, t1, t2, neg);
    }
    if ((second == PosClass::kAdjective || second == PosClass::kNoun) &&
        last_is_prep()) {
      Tokens w2 = slice(cut, 1, cut.size());
      w2[0] = lex.lemmatize(w2[0]);
      Tokens w1{w2[0]};
      return make(std::move(w1), 1, std::move(w2), 2, t1, t2, neg);
    }
    if (second == PosClass::kPastParticiple) {
      Tokens w2 = slice(cut, 1, cut.size());
      w2[0] = lex.lemmatize(w2[0]);
      return make({w2[0]}, 2, w2, last_is_prep() ? 2 : 3, t1, t2, neg);
    }
    if (last_is_prep()) {
      // Copula + other word + preposition ("is gravitate towards").
      Tokens w2 = cut;
      w2[0] = "be";
      return make({"be"}, 1, std::move(w2), 2, t1, t2, neg);
    }
    return std::nullopt;
  }

  cut[0] = lemma;
  if (cut.size() == 1) return make({lemma}, 1, {lemma}, 2, t1, t2, neg);
  if (last_is_prep()) return make({lemma}, 1, cut, 2, t1, t2, neg);
  return std::nullopt;
}

}  // namespace

std::string argument_phrase(const ArgType& type, char letter) {
  return type.title() + " " + std::string(1, letter);
}

std::pair<char, char> slot_letters(const TypedPredicate& p,
                                   const TypePair& tp) {
  if (p.type1() == p.type2()) {
    if (!tp.same_type() || tp.first() != p.type1()) {
      throw UnsupportedShape(p.text() + " does not fit pair " + tp.key());
    }
    return {'A', 'B'};
  }
  if (tp.same_type() || !tp.contains(p.type1()) || !tp.contains(p.type2())) {
    throw UnsupportedShape(p.text() + " does not fit pair " + tp.key());
  }
  return {tp.letter_of(p.type1()), tp.letter_of(p.type2())};
}

std::string relation_phrase(const TypedPredicate& p, const Lexicon& lex) {
  const auto& w1 = p.slot1().words;
  const auto& w2 = p.slot2().words;
  const int i1 = p.slot1().index;
  const int i2 = p.slot2().index;
  if (w1.size() != 1 || w2.empty() || w2[0] != w1[0]) {
    throw UnsupportedShape(p.text());
  }
  const std::string& center = w1[0];
  const Tokens rest = slice(w2, 1, w2.size());
  const bool prep_last =
      !rest.empty() && lex.pos_class(rest.back()) == PosClass::kPreposition;
  const bool neg = p.negated();
  auto copula = [&](const Tokens& tail) {
    Tokens out{"is"};
    if (neg) out.push_back("not");
    out.insert(out.end(), tail.begin(), tail.end());
    return join(out, " ");
  };
  auto active = [&](const Tokens& tail) {
    Tokens out;
    if (neg) {
      out = {"does", "not", center};
    } else {
      out = {lex.third_person(center)};
    }
    out.insert(out.end(), tail.begin(), tail.end());
    return join(out, " ");
  };

  if (i1 == 1 && i2 == 2) {
    if (center == "be") return copula(rest);
    const PosClass c = lex.pos_class(center);
    const bool nominal = c == PosClass::kNoun || c == PosClass::kAdjective;
    if (rest.empty()) {
      if (nominal) throw UnsupportedShape(p.text());
      return active(rest);
    }
    if (!prep_last) throw UnsupportedShape(p.text());
    if (nominal) {
      Tokens tail{center};
      tail.insert(tail.end(), rest.begin(), rest.end());
      return copula(tail);
    }
    return active(rest);
  }
  if (i1 == 2 && (i2 == 2 || i2 == 3) && center != "be") {
    if (i2 == 2 && !prep_last) throw UnsupportedShape(p.text());
    if (i2 == 3 && prep_last) throw UnsupportedShape(p.text());
    Tokens tail{lex.past_participle(center)};
    tail.insert(tail.end(), rest.begin(), rest.end());
    return copula(tail);
  }
  throw UnsupportedShape(p.text());
}

TemplateSentence render_sentence(const TypedPredicate& p, const TypePair& tp,
                                 const Lexicon& lex) {
  auto [l1, l2] = slot_letters(p, tp);
  TemplateSentence out{argument_phrase(p.type1(), l1) + " " +
                           relation_phrase(p, lex) + " " +
                           argument_phrase(p.type2(), l2),
                       tp, l1, l2};
  return out;
}

std::optional<TypedPredicate> resolve_sentence(std::string_view sentence,
                                               const TypePair& tp,
                                               const Lexicon& lex) {
  try {
    Tokens raw;
    for (const auto& w : split_words(sentence)) {
      std::string t = strip_punct(w);
      if (!t.empty()) raw.push_back(std::move(t));
    }
    Placeholder a = find_placeholder(raw, tp.first(), 'A', 0, 0);
    if (!a.found) return std::nullopt;
    Placeholder b = find_placeholder(raw, tp.second(), 'B', a.start, a.length);
    if (!b.found) return std::nullopt;
    const bool a_first = a.start < b.start;
    const ArgType& t1 = a_first ? tp.first() : tp.second();
    const ArgType& t2 = a_first ? tp.second() : tp.first();

    Tokens l;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      bool in_a = i >= a.start && i < a.start + a.length;
      bool in_b = i >= b.start && i < b.start + b.length;
      if (!in_a && !in_b) l.push_back(to_lower(raw[i]));
    }
    return resolve_tokens(std::move(l), t1, t2, lex);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string normalize_sentence(std::string_view sentence) {
  std::string s = join(split_words(sentence), " ");
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace egg
