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

#include "egg/lexicon.hpp"

#include <fstream>
#include <sstream>

#include "egg/error.hpp"
#include "egg/predicate.hpp"

namespace egg {

namespace {

constexpr std::string_view kBuiltinLexicon =
#include "lexicon_data.inc"
    ;

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool is_consonant(char c) { return c >= 'a' && c <= 'z' && !is_vowel(c); }

bool ends_with_any(std::string_view s, const std::vector<std::string>& ends) {
  for (const auto& e : ends) {
    if (s.ends_with(e)) return true;
  }
  return false;
}

// "stopp" -> "stop"; keeps ll/ss/zz/ff which are common in base forms.
std::string undouble(const std::string& stem) {
  auto n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && is_consonant(stem[n - 1]) &&
      stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z' &&
      stem[n - 1] != 'f') {
    return stem.substr(0, n - 1);
  }
  return stem;
}

int vowel_groups(std::string_view w) {
  int groups = 0;
  bool in_vowel = false;
  for (char c : w) {
    bool v = is_vowel(c);
    if (v && !in_vowel) ++groups;
    in_vowel = v;
  }
  return groups;
}

}  // namespace

std::string_view to_string(PosClass c) {
  switch (c) {
    case PosClass::kVerb: return "verb";
    case PosClass::kPastParticiple: return "pp_verb";
    case PosClass::kPreposition: return "preposition";
    case PosClass::kAdverb: return "adverb";
    case PosClass::kAdjective: return "adjective";
    case PosClass::kNoun: return "noun";
    case PosClass::kModal: return "modal";
    case PosClass::kOther: return "other";
  }
  return "other";
}

Lexicon Lexicon::parse(std::string_view text, const std::string& source) {
  Lexicon lex;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.starts_with("@version")) {
      try {
        lex.version_ = std::stoi(line.substr(8));
      } catch (const std::exception&) {
        throw FormatError(source, line_no, "bad version line");
      }
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError(source, line_no, "bad section");
      section = line.substr(1, line.size() - 2);
      continue;
    }
    auto fields = split_words(to_lower(line));
    auto single = [&](std::unordered_set<std::string>& set) {
      if (fields.size() != 1) {
        throw FormatError(source, line_no, "expected one token per line");
      }
      set.insert(fields[0]);
    };
    if (section == "modal") {
      single(lex.modals_);
    } else if (section == "preposition") {
      single(lex.prepositions_);
    } else if (section == "adverb") {
      single(lex.adverbs_);
    } else if (section == "verb") {
      single(lex.verbs_);
    } else if (section == "noun") {
      single(lex.nouns_);
    } else if (section == "adjective") {
      single(lex.adjectives_);
    } else if (section == "irregular") {
      if (fields.size() < 4) {
        throw FormatError(source, line_no,
                          "irregular verb needs base 3sg pp gerund");
      }
      VerbForms v{fields[0], fields[1], fields[2], fields[3]};
      lex.irregular_base_[v.base] = lex.irregular_.size();
      lex.participles_.insert(v.past_participle);
      for (const auto& f : fields) lex.form_to_base_.emplace(f, v.base);
      lex.form_to_base_[v.base] = v.base;
      lex.irregular_.push_back(std::move(v));
    } else if (section == "suffix") {
      if (fields.size() < 2 || fields.size() > 3) {
        throw FormatError(source, line_no,
                          "suffix rule needs: suffix replacement [condition]");
      }
      SuffixRule r;
      r.suffix = fields[0];
      r.replacement = fields[1] == "-" ? "" : fields[1];
      if (fields.size() == 3) {
        std::string cond = fields[2];
        if (!cond.empty() && cond[0] == '!') {
          r.forbid = true;
          cond.erase(0, 1);
        }
        std::size_t start = 0;
        while (true) {
          auto bar = cond.find('|', start);
          r.stem_endings.push_back(cond.substr(start, bar - start));
          if (bar == std::string::npos) break;
          start = bar + 1;
        }
      }
      lex.rules_.push_back(std::move(r));
    } else {
      throw FormatError(source, line_no, "entry outside a known section");
    }
  }
  if (lex.version_ <= 0) throw FormatError(source, 0, "missing @version");
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kUsage, "cannot open lexicon " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

const Lexicon& Lexicon::builtin() {
  static const Lexicon lex = parse(kBuiltinLexicon, "<builtin lexicon>");
  return lex;
}

bool Lexicon::is_known_verb(std::string_view base) const {
  std::string b(base);
  return verbs_.count(b) || irregular_base_.count(b);
}

bool Lexicon::is_known_word(std::string_view t) const {
  std::string s(t);
  return verbs_.count(s) || irregular_base_.count(s) || nouns_.count(s) ||
         adjectives_.count(s);
}

std::optional<std::string> Lexicon::apply_rules(const std::string& token) const {
  std::optional<std::string> fallback;
  for (const auto& rule : rules_) {
    if (token.size() <= rule.suffix.size() || !token.ends_with(rule.suffix)) {
      continue;
    }
    std::string bare = token.substr(0, token.size() - rule.suffix.size());
    if (!rule.stem_endings.empty() &&
        ends_with_any(bare, rule.stem_endings) == rule.forbid) {
      continue;
    }
    std::string stem = bare + rule.replacement;
    if (stem.size() < 2) continue;
    for (const auto& cand : {stem, stem + "e", undouble(stem)}) {
      if (is_known_word(cand) || form_to_base_.count(cand)) return cand;
    }
    if (!fallback) fallback = undouble(stem);
  }
  return fallback;
}

std::string Lexicon::lemmatize(std::string_view token) const {
  std::string t = to_lower(token);
  // Every rewrite shortens the token, so this terminates.
  while (true) {
    if (auto it = form_to_base_.find(t); it != form_to_base_.end()) {
      return it->second;
    }
    if (is_known_word(t)) return t;
    auto next = apply_rules(t);
    if (!next || next->size() >= t.size()) return t;
    t = std::move(*next);
  }
}

PosClass Lexicon::pos_class(std::string_view token) const {
  std::string t = to_lower(token);
  if (modals_.count(t)) return PosClass::kModal;
  if (prepositions_.count(t)) return PosClass::kPreposition;
  if (adverbs_.count(t)) return PosClass::kAdverb;
  if (form_to_base_.count(t)) {
    return participles_.count(t) ? PosClass::kPastParticiple : PosClass::kVerb;
  }
  if (verbs_.count(t)) return PosClass::kVerb;
  std::string lemma = lemmatize(t);
  if (lemma != t && is_known_verb(lemma)) {
    return t.ends_with("ed") ? PosClass::kPastParticiple : PosClass::kVerb;
  }
  if (adjectives_.count(t)) return PosClass::kAdjective;
  if (nouns_.count(t) || (lemma != t && nouns_.count(lemma))) {
    return PosClass::kNoun;
  }
  if (t.size() > 4 && t.ends_with("ly")) return PosClass::kAdverb;
  if (t.size() > 4 && t.ends_with("ed")) return PosClass::kPastParticiple;
  if (t.size() > 5 && t.ends_with("ing")) return PosClass::kVerb;
  return PosClass::kOther;
}

std::string Lexicon::third_person(std::string_view base) const {
  std::string b = to_lower(base);
  if (auto it = irregular_base_.find(b); it != irregular_base_.end()) {
    return irregular_[it->second].third_person;
  }
  auto n = b.size();
  if (n >= 2 && b.back() == 'y' && is_consonant(b[n - 2])) {
    return b.substr(0, n - 1) + "ies";
  }
  if (b.ends_with("s") || b.ends_with("x") || b.ends_with("z") ||
      b.ends_with("ch") || b.ends_with("sh") || b.ends_with("o")) {
    return b + "es";
  }
  return b + "s";
}

std::string Lexicon::past_participle(std::string_view base) const {
  std::string b = to_lower(base);
  if (auto it = irregular_base_.find(b); it != irregular_base_.end()) {
    return irregular_[it->second].past_participle;
  }
  auto n = b.size();
  if (b.back() == 'e') return b + "d";
  if (n >= 2 && b.back() == 'y' && is_consonant(b[n - 2])) {
    return b.substr(0, n - 1) + "ied";
  }
  // Monosyllabic consonant-vowel-consonant endings double: ban -> banned.
  if (n >= 3 && vowel_groups(b) == 1 && is_consonant(b[n - 1]) &&
      b[n - 1] != 'w' && b[n - 1] != 'x' && b[n - 1] != 'y' &&
      is_vowel(b[n - 2]) && is_consonant(b[n - 3])) {
    return b + b.back() + "ed";
  }
  return b + "ed";
}

std::string lemmatize(std::string_view token) {
  return Lexicon::builtin().lemmatize(token);
}

PosClass pos_class(std::string_view token, const Lexicon& lexicon) {
  return lexicon.pos_class(token);
}

}  // namespace egg
