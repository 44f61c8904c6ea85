#pragma once

#include <cstddef>
#include <random>
#include <vector>

namespace tcn {

/// Draws `count` entries from `pool`. When the pool holds at least `count` entries the draw is
/// without replacement (partial Fisher-Yates); otherwise entries are drawn with replacement.
inline std::vector<std::size_t> draw_from_pool(std::vector<std::size_t> pool, std::size_t count,
                                               std::mt19937_64& rng) {
  std::vector<std::size_t> out;
  out.reserve(count);
  if (pool.empty()) return out;
  if (pool.size() >= count) {
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(pool[i]);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  }
  return out;
}

/// Indices into a training set plus the binary or class label for each.
struct Batch {
  std::vector<std::size_t> indices;
  std::vector<int> labels;

  std::size_t size() const { return indices.size(); }
};

}  // namespace tcn
