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

#ifndef EGG_EMBEDDING_CACHE_HPP_
#define EGG_EMBEDDING_CACHE_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace egg {

// Predicate text -> sentence embedding, stored as a checksummed binary file.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::size_t dimension) : dimension_(dimension) {}

  // Throws DimensionMismatch on a vector of the wrong size.
  void put(const std::string& key, std::vector<double> vector);
  const std::vector<double>* find(const std::string& key) const;

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, std::vector<double>>& entries() const {
    return entries_;
  }

  void save(const std::filesystem::path& path) const;
  // Throws FormatError on a bad magic, version, size or checksum.
  static EmbeddingCache load(const std::filesystem::path& path);

  bool operator==(const EmbeddingCache&) const = default;

 private:
  std::size_t dimension_;
  std::map<std::string, std::vector<double>> entries_;
};

}  // namespace egg

#endif  // EGG_EMBEDDING_CACHE_HPP_
