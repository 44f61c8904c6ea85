#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tcn/nn/tensor.hpp"

namespace tcn::nn {

/// Model checkpoint file, little-endian throughout:
///
///   char[4]  magic "TCNW"
///   u32      version (1)
///   u32      metadata byte count, followed by that many bytes of UTF-8 JSON
///   u32      tensor count
///   per tensor: u32 rows, u32 cols, rows*cols f64 values, row-major
///
/// Metadata carries the model kind and configuration needed to rebuild it.
struct Checkpoint {
  std::string metadata;
  std::vector<Matrix<double>> tensors;

  friend bool operator==(const Checkpoint& a, const Checkpoint& b) {
    if (a.metadata != b.metadata || a.tensors.size() != b.tensors.size()) return false;
    for (std::size_t i = 0; i < a.tensors.size(); ++i) {
      const auto& x = a.tensors[i];
      const auto& y = b.tensors[i];
      if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
      if (!std::equal(x.data(), x.data() + x.size(), y.data(),
                      [](double p, double q) { return std::bit_cast<std::uint64_t>(p) ==
                                                      std::bit_cast<std::uint64_t>(q); })) {
        return false;
      }
    }
    return true;
  }
};

inline constexpr char kCheckpointMagic[4] = {'T', 'C', 'N', 'W'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace tcn::nn
