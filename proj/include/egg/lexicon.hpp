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

#ifndef EGG_LEXICON_HPP_
#define EGG_LEXICON_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace egg {

enum class PosClass {
  kVerb,
  kPastParticiple,
  kPreposition,
  kAdverb,
  kAdjective,
  kNoun,
  kModal,
  kOther,
};

std::string_view to_string(PosClass c);

// Closed-class word lists, irregular verb table and lemma rewrite rules.
//
// Loaded from the plain-text format in data/lexicon.txt. A copy of that file
// is compiled in and returned by builtin(). Immutable after construction.
class Lexicon {
 public:
  struct VerbForms {
    std::string base;
    std::string third_person;
    std::string past_participle;
    std::string gerund;
  };

  struct SuffixRule {
    std::string suffix;
    std::string replacement;
    std::vector<std::string> stem_endings;  // empty: any stem
    bool forbid = false;                    // stem_endings are forbidden
  };

  // Throws FormatError with the offending line.
  static Lexicon parse(std::string_view text, const std::string& source);
  static Lexicon load(const std::filesystem::path& path);
  static const Lexicon& builtin();

  int version() const noexcept { return version_; }

  // Priority: modal > preposition > adverb > verb forms > adjective/noun >
  // other. Unlisted tokens fall back to suffix heuristics, then kOther.
  PosClass pos_class(std::string_view token) const;

  // Irregular table first, then suffix rules (with e-restoration and
  // consonant-doubling repair), iterated to a fixpoint; identity otherwise.
  // Idempotent.
  std::string lemmatize(std::string_view token) const;

  std::string third_person(std::string_view base) const;
  std::string past_participle(std::string_view base) const;

  bool is_modal(std::string_view t) const { return contains(modals_, t); }
  bool is_preposition(std::string_view t) const {
    return contains(prepositions_, t);
  }
  bool is_known_verb(std::string_view base) const;
  bool is_known_word(std::string_view t) const;

  const std::unordered_set<std::string>& verbs() const { return verbs_; }
  const std::unordered_set<std::string>& nouns() const { return nouns_; }
  const std::unordered_set<std::string>& adjectives() const {
    return adjectives_;
  }
  const std::unordered_set<std::string>& prepositions() const {
    return prepositions_;
  }
  const std::vector<VerbForms>& irregular_verbs() const { return irregular_; }

 private:
  static bool contains(const std::unordered_set<std::string>& s,
                       std::string_view t) {
    return s.find(std::string(t)) != s.end();
  }
  std::optional<std::string> apply_rules(const std::string& token) const;

  int version_ = 0;
  std::unordered_set<std::string> modals_;
  std::unordered_set<std::string> prepositions_;
  std::unordered_set<std::string> adverbs_;
  std::unordered_set<std::string> verbs_;
  std::unordered_set<std::string> nouns_;
  std::unordered_set<std::string> adjectives_;
  std::vector<VerbForms> irregular_;
  std::unordered_map<std::string, std::size_t> irregular_base_;  // base -> row
  std::unordered_map<std::string, std::string> form_to_base_;
  std::unordered_set<std::string> participles_;
  std::vector<SuffixRule> rules_;
};

// Convenience wrappers over Lexicon::builtin().
std::string lemmatize(std::string_view token);
PosClass pos_class(std::string_view token, const Lexicon& lexicon);

}  // namespace egg

#endif  // EGG_LEXICON_HPP_
