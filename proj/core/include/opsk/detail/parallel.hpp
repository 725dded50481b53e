#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace opsk {

template <typename T>
std::vector<T> parallel_map(std::size_t count, int threads,
                            const std::function<T(std::size_t)>& fn) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const auto width = static_cast<std::size_t>(threads);
  if (width == 1 || count <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(std::min(width, count));
    for (std::size_t t = 0; t < std::min(width, count); ++t) pool.emplace_back(worker);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace opsk
