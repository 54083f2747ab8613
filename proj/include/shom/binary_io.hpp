#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "error.hpp"

namespace shom::io {

/// Little-endian writers/readers independent of host byte order.
template <typename UInt>
void put_le(std::ostream& os, UInt value) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  os.write(bytes, sizeof(UInt));
}

inline void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }

template <typename UInt>
UInt get_le(std::istream& is, const char* what) {
  unsigned char bytes[sizeof(UInt)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(UInt)))
    throw FormatError(std::string("truncated file while reading ") + what);
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

inline double get_f64(std::istream& is, const char* what) {
  return std::bit_cast<double>(get_le<std::uint64_t>(is, what));
}

}  // namespace shom::io
