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

#ifndef EGG_PARALLEL_HPP_
#define EGG_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace egg {

// Result slot of one parallel task: a value or the exception it raised.
template <typename T>
struct Outcome {
  std::optional<T> value;
  std::exception_ptr error;

  bool ok() const { return value.has_value(); }
};

// Runs fn(i) for i in [0, n) on at most `workers` threads. Results are
// returned in index order regardless of completion order; exceptions are
// captured per item.
template <typename Fn>
auto parallel_map(std::size_t n, std::size_t workers, Fn fn)
    -> std::vector<Outcome<std::invoke_result_t<Fn&, std::size_t>>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Outcome<T>> out(n);
  auto run_one = [&](std::size_t i) {
    try {
      out[i].value.emplace(fn(i));
    } catch (...) {
      out[i].error = std::current_exception();
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) run_one(i);
    });
  }
  pool.clear();  // joins
  return out;
}

// Unwraps outcomes, rethrowing the first error in index order.
template <typename T>
std::vector<T> unwrap_all(std::vector<Outcome<T>>&& outcomes) {
  std::vector<T> out;
  out.reserve(outcomes.size());
  for (auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
    out.push_back(std::move(*o.value));
  }
  return out;
}

}  // namespace egg

#endif  // EGG_PARALLEL_HPP_
