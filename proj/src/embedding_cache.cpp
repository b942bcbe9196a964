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

#include "egg/embedding_cache.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include <zlib.h>

#include "egg/error.hpp"

namespace egg {

namespace {

constexpr char kMagic[8] = {'E', 'G', 'G', 'E', 'M', 'B', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put_raw(std::string& buf, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  buf.append(bytes, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& buf, std::string source)
      : buf_(buf), source_(std::move(source)) {}

  template <typename T>
  T take() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string take_bytes(std::size_t n) {
    need(n);
    std::string out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw FormatError(source_, 0, "truncated");
  }
  const std::string& buf_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const char* data, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(len)));
}

}  // namespace

void EmbeddingCache::put(const std::string& key, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw DimensionMismatch(dimension_, vector.size());
  }
  entries_[key] = std::move(vector);
}

const std::vector<double>* EmbeddingCache::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void EmbeddingCache::save(const std::filesystem::path& path) const {
  std::string buf(kMagic, sizeof(kMagic));
  put_raw<std::uint32_t>(buf, kVersion);
  put_raw<std::uint64_t>(buf, dimension_);
  put_raw<std::uint64_t>(buf, entries_.size());
  for (const auto& [key, vec] : entries_) {
    put_raw<std::uint32_t>(buf, static_cast<std::uint32_t>(key.size()));
    buf += key;
    for (double x : vec) put_raw<double>(buf, x);
  }
  put_raw<std::uint32_t>(buf, crc_of(buf.data(), buf.size()));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(path.string(), 0, "cannot write file");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

EmbeddingCache EmbeddingCache::load(const std::filesystem::path& path) {
  const std::string src = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(src, 0, "cannot open file");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < sizeof(kMagic) + 4 ||
      std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(src, 0, "not an embedding cache");
  }
  std::uint32_t stored;
  std::memcpy(&stored, buf.data() + buf.size() - 4, 4);
  if (stored != crc_of(buf.data(), buf.size() - 4)) {
    throw FormatError(src, 0, "checksum mismatch");
  }
  const std::string body = buf.substr(0, buf.size() - 4);
  Reader r(body, src);
  r.take_bytes(sizeof(kMagic));
  if (r.take<std::uint32_t>() != kVersion) {
    throw FormatError(src, 0, "unsupported version");
  }
  EmbeddingCache cache(r.take<std::uint64_t>());
  const auto count = r.take<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string key = r.take_bytes(r.take<std::uint32_t>());
    std::vector<double> vec(cache.dimension_);
    for (auto& x : vec) x = r.take<double>();
    cache.entries_.emplace(std::move(key), std::move(vec));
  }
  if (r.pos() != body.size()) throw FormatError(src, 0, "trailing bytes");
  return cache;
}

}  // namespace egg
