/* Copyright 2026 The geodiv Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace geodiv {

// Runs body(begin, end) or body(chunk, begin, end) over contiguous, disjoint
// chunks of [0, count).
// Chunk boundaries depend only on count and workers, and every caller
// writes to per-index output slots, so results do not depend on scheduling.
template <typename Body>
void parallel_for_chunks(std::size_t count, std::size_t workers, Body&& body) {
  auto call = [&body](std::size_t chunk, std::size_t begin, std::size_t end) {
    if constexpr (std::is_invocable_v<Body&, std::size_t, std::size_t, std::size_t>) {
      body(chunk, begin, end);
    } else {
      body(begin, end);
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    if (count > 0) call(0, 0, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = count * w / workers;
      const std::size_t end = count * (w + 1) / workers;
      threads.emplace_back([&, w, begin, end] {
        try {
          call(w, begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace geodiv
