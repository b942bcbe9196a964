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

#ifndef EGG_PREDICATE_HPP_
#define EGG_PREDICATE_HPP_

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace egg {

// Argument type such as "person" or "living_thing".
class ArgType {
 public:
  ArgType() = default;
  // Throws MalformedPredicate unless the name is non-empty lowercase letters
  // and underscores.
  explicit ArgType(std::string name);

  const std::string& name() const noexcept { return name_; }
  // "living_thing" -> "Living Thing"
  std::string title() const;

  auto operator<=>(const ArgType&) const = default;

 private:
  std::string name_;
};

// Relation tokens attached to one argument, plus that argument's index.
struct RelSlot {
  std::vector<std::string> words;
  int index = 1;

  bool operator==(const RelSlot&) const = default;
};

// Binary predicate (w1.i1, w2.i2, t1, t2), optionally negated.
//
// Immutable. The canonical text is computed once at construction and used for
// equality, ordering and hashing, so ordered containers iterate in canonical
// string order.
class TypedPredicate {
 public:
  TypedPredicate(RelSlot slot1, RelSlot slot2, ArgType type1, ArgType type2,
                 bool negated = false);

  const RelSlot& slot1() const noexcept { return slot1_; }
  const RelSlot& slot2() const noexcept { return slot2_; }
  const ArgType& type1() const noexcept { return type1_; }
  const ArgType& type2() const noexcept { return type2_; }
  bool negated() const noexcept { return negated_; }
  const std::string& text() const noexcept { return text_; }

  // Copy with slot types replaced.
  TypedPredicate with_types(ArgType type1, ArgType type2) const;

  bool operator==(const TypedPredicate& o) const { return text_ == o.text_; }
  std::strong_ordering operator<=>(const TypedPredicate& o) const {
    return text_ <=> o.text_;
  }

 private:
  RelSlot slot1_;
  RelSlot slot2_;
  ArgType type1_;
  ArgType type2_;
  bool negated_ = false;
  std::string text_;
};

inline constexpr std::string_view kNegationPrefix = "NEG__";

// Parses `[NEG__](w1.i1,w2.i2,t1,t2)`; whitespace around fields is ignored.
TypedPredicate parse_predicate(std::string_view text);
std::string format_predicate(const TypedPredicate& p);

// Ordered pair of argument types with a letter assignment: first() is
// rendered with letter "A", second() with "B".
class TypePair {
 public:
  // Lexicographic order, the form used to key graphs.
  static TypePair canonical(const ArgType& a, const ArgType& b);
  // Keeps the given order, for callers that need a particular letter map.
  static TypePair ordered(ArgType first, ArgType second);

  const ArgType& first() const noexcept { return first_; }
  const ArgType& second() const noexcept { return second_; }
  bool same_type() const noexcept { return first_ == second_; }
  bool contains(const ArgType& t) const {
    return t == first_ || t == second_;
  }
  // Letter ('A' or 'B') of a type. For same-type pairs this is 'A'.
  char letter_of(const ArgType& t) const;

  TypePair swapped() const { return ordered(second_, first_); }
  TypePair canonicalized() const { return canonical(first_, second_); }
  // "government\tperson"-style key used for file names and maps.
  std::string key() const;

  auto operator<=>(const TypePair&) const = default;

 private:
  TypePair(ArgType first, ArgType second)
      : first_(std::move(first)), second_(std::move(second)) {}

  ArgType first_;
  ArgType second_;
};

TypePair type_pair_of(const TypedPredicate& p);

// Lowercase, split on whitespace.
std::vector<std::string> split_words(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

}  // namespace egg

template <>
struct std::hash<egg::TypedPredicate> {
  std::size_t operator()(const egg::TypedPredicate& p) const noexcept {
    return std::hash<std::string>{}(p.text());
  }
};

#endif  // EGG_PREDICATE_HPP_
