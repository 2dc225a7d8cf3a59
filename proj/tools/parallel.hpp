#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace qtce::cli {

// Evaluates f(0..n-1) on up to `threads` workers. Results keep index order;
// the exception of the lowest failing index is rethrown.
template <class F>
auto parallel_map(int n, int threads, F f) -> std::vector<decltype(f(0))> {
  using R = decltype(f(0));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int count = std::clamp(threads, 1, std::max(n, 1));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace qtce::cli
