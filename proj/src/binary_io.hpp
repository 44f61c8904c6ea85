#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "tcn/error.hpp"

// Little-endian primitives shared by the feature and checkpoint formats.
namespace tcn::detail {

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(bytes, sizeof(UInt));
}

template <typename UInt>
UInt get_le(std::istream& in, const std::string& what) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(UInt))) {
    throw Error(ErrorCode::kTruncatedFile, "unexpected end of file while reading " + what);
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

inline void put_f32(std::ostream& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

inline float get_f32(std::istream& in, const std::string& what) {
  return std::bit_cast<float>(get_le<std::uint32_t>(in, what));
}
inline double get_f64(std::istream& in, const std::string& what) {
  return std::bit_cast<double>(get_le<std::uint64_t>(in, what));
}

}  // namespace tcn::detail
