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

#ifndef EGG_SURFACE_HPP_
#define EGG_SURFACE_HPP_

#include <optional>
#include <string>
#include <string_view>

#include "egg/lexicon.hpp"
#include "egg/predicate.hpp"

namespace egg {

// A rendered predicate such as "Government A is elected in Time B".
struct TemplateSentence {
  std::string text;
  TypePair type_pair;
  char slot1_letter = 'A';
  char slot2_letter = 'B';
};

// "Person" + 'A' -> "Person A".
std::string argument_phrase(const ArgType& type, char letter);

// Letters carried by the two slots of p under tp. For same-type pairs slot 1
// is always 'A'. Throws UnsupportedShape if p's types do not fit tp.
std::pair<char, char> slot_letters(const TypedPredicate& p, const TypePair& tp);

// The relation text between the two arguments, e.g. "is elected in".
// Throws UnsupportedShape for shapes outside the rendering table.
std::string relation_phrase(const TypedPredicate& p,
                            const Lexicon& lexicon = Lexicon::builtin());

// Sentence generator: slot-1 argument, relation phrase, slot-2 argument.
TemplateSentence render_sentence(const TypedPredicate& p, const TypePair& tp,
                                 const Lexicon& lexicon = Lexicon::builtin());

// Sentence-to-predicate mapping. Returns nullopt when the sentence is not a
// valid predicate sentence under tp. Never throws.
std::optional<TypedPredicate> resolve_sentence(
    std::string_view sentence, const TypePair& tp,
    const Lexicon& lexicon = Lexicon::builtin());

// Trims a trailing period and collapses whitespace, for comparisons.
std::string normalize_sentence(std::string_view sentence);

}  // namespace egg

#endif  // EGG_SURFACE_HPP_
