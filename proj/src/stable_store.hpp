#pragma once

#include <cstddef>
#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "gluecount/errors.hpp"

namespace gluecount::detail {

/// Append-only storage whose elements never move, so readers of an id they
/// were handed need no lock.
template <typename T>
class StableStore {
 public:
  static constexpr std::size_t kChunk = 4096;
  static constexpr std::size_t kChunks = 8192;

  StableStore() : chunks_(kChunks) {}

  // Caller serializes appends.
  std::uint32_t append(std::unique_ptr<T> value) {
    const std::size_t n = size_.load(std::memory_order_relaxed);
    if (n == kChunk * kChunks) throw LimitExceeded("too many interned entries");
    auto& chunk = chunks_[n / kChunk];
    if (!chunk) chunk = std::make_unique<std::unique_ptr<T>[]>(kChunk);
    chunk[n % kChunk] = std::move(value);
    size_.store(n + 1, std::memory_order_release);
    return static_cast<std::uint32_t>(n);
  }
  T& operator[](std::uint32_t id) const { return *chunks_[id / kChunk][id % kChunk]; }
  std::size_t size() const { return size_.load(std::memory_order_acquire); }

 private:
  std::vector<std::unique_ptr<std::unique_ptr<T>[]>> chunks_;
  std::atomic<std::size_t> size_{0};
};

}  // namespace gluecount::detail
