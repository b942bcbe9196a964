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

#include "egg/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "egg/error.hpp"

namespace egg {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

void validate_token(const std::string& w) {
  if (w.empty()) throw MalformedPredicate("empty relation token");
  for (char c : w) {
    if (c == '.' || c == ',' || c == '(' || c == ')' || is_space(c)) {
      throw MalformedPredicate("bad character in token '" + w + "'");
    }
  }
}

RelSlot normalize_slot(RelSlot slot) {
  if (slot.words.empty()) throw MalformedPredicate("empty slot");
  if (slot.index < 1 || slot.index > 3) {
    throw MalformedPredicate("slot index " + std::to_string(slot.index) +
                             " outside 1..3");
  }
  for (auto& w : slot.words) {
    w = to_lower(w);
    validate_token(w);
  }
  return slot;
}

std::string slot_text(const RelSlot& s) {
  return join(s.words, ".") + "." + std::to_string(s.index);
}

RelSlot parse_slot(std::string_view field) {
  std::string f = trim(field);
  auto dot = f.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == f.size()) {
    throw MalformedPredicate("slot '" + f + "' lacks word.index form");
  }
  RelSlot slot;
  std::string_view idx(f.data() + dot + 1, f.size() - dot - 1);
  auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(),
                                   slot.index);
  if (ec != std::errc() || ptr != idx.data() + idx.size()) {
    throw MalformedPredicate("non-integer index in '" + f + "'");
  }
  std::string words = f.substr(0, dot);
  std::size_t start = 0;
  while (true) {
    auto next = words.find('.', start);
    slot.words.push_back(trim(words.substr(start, next - start)));
    if (next == std::string::npos) break;
    start = next + 1;
  }
  return normalize_slot(std::move(slot));
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

ArgType::ArgType(std::string name) : name_(std::move(name)) {
  if (name_.empty()) throw MalformedPredicate("empty argument type");
  for (char c : name_) {
    if (!((c >= 'a' && c <= 'z') || c == '_')) {
      throw MalformedPredicate("argument type '" + name_ +
                               "' must be lowercase letters or '_'");
    }
  }
}

std::string ArgType::title() const {
  std::string out;
  bool up = true;
  for (char c : name_) {
    if (c == '_') {
      out += ' ';
      up = true;
    } else {
      out += up ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
      up = false;
    }
  }
  return out;
}

TypedPredicate::TypedPredicate(RelSlot slot1, RelSlot slot2, ArgType type1,
                               ArgType type2, bool negated)
    : slot1_(normalize_slot(std::move(slot1))),
      slot2_(normalize_slot(std::move(slot2))),
      type1_(std::move(type1)),
      type2_(std::move(type2)),
      negated_(negated) {
  if (type1_.name().empty() || type2_.name().empty()) {
    throw MalformedPredicate("missing argument type");
  }
  text_ = std::string(negated_ ? kNegationPrefix : "") + "(" +
          slot_text(slot1_) + "," + slot_text(slot2_) + "," + type1_.name() +
          "," + type2_.name() + ")";
}

TypedPredicate TypedPredicate::with_types(ArgType type1, ArgType type2) const {
  return TypedPredicate(slot1_, slot2_, std::move(type1), std::move(type2),
                        negated_);
}

TypedPredicate parse_predicate(std::string_view text) {
  std::string s = trim(text);
  bool negated = false;
  if (s.starts_with(kNegationPrefix)) {
    negated = true;
    s = trim(std::string_view(s).substr(kNegationPrefix.size()));
  }
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw MalformedPredicate("'" + std::string(text) + "' is not parenthesized");
  }
  std::string_view body(s.data() + 1, s.size() - 2);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = body.find(',', start);
    fields.emplace_back(body.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 4) {
    throw MalformedPredicate("expected 4 fields, got " +
                             std::to_string(fields.size()) + " in '" +
                             std::string(text) + "'");
  }
  return TypedPredicate(parse_slot(fields[0]), parse_slot(fields[1]),
                        ArgType(trim(fields[2])), ArgType(trim(fields[3])),
                        negated);
}

std::string format_predicate(const TypedPredicate& p) { return p.text(); }

TypePair TypePair::canonical(const ArgType& a, const ArgType& b) {
  return b < a ? TypePair(b, a) : TypePair(a, b);
}

TypePair TypePair::ordered(ArgType first, ArgType second) {
  if (first.name().empty() || second.name().empty()) {
    throw MalformedPredicate("type pair with empty type");
  }
  return TypePair(std::move(first), std::move(second));
}

char TypePair::letter_of(const ArgType& t) const {
  if (t == first_) return 'A';
  if (t == second_) return 'B';
  throw UnsupportedShape("type '" + t.name() + "' not in pair " + key());
}

std::string TypePair::key() const {
  return first_.name() + "\t" + second_.name();
}

TypePair type_pair_of(const TypedPredicate& p) {
  return TypePair::canonical(p.type1(), p.type2());
}

}  // namespace egg
