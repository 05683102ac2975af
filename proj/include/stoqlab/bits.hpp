#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stoqlab {

// Bitstrings are packed into uint64_t. Wires are 1-based and rendered
// big-endian: wire 1 is the leftmost character, i.e. bit (width - 1).
using BitString = std::uint64_t;

inline int wire_bit_pos(int width, int wire) { return width - wire; }

inline bool get_wire(BitString x, int width, int wire) {
  return (x >> wire_bit_pos(width, wire)) & 1u;
}

inline BitString flip_wire(BitString x, int width, int wire) {
  return x ^ (BitString{1} << wire_bit_pos(width, wire));
}

inline BitString set_wire(BitString x, int width, int wire, bool value) {
  BitString mask = BitString{1} << wire_bit_pos(width, wire);
  return value ? (x | mask) : (x & ~mask);
}

inline std::string render_bits(BitString x, int width) {
  std::string s(static_cast<size_t>(width), '0');
  for (int w = 1; w <= width; ++w)
    if (get_wire(x, width, w)) s[static_cast<size_t>(w - 1)] = '1';
  return s;
}

inline BitString parse_bits(const std::string& s) {
  if (s.size() > 62) throw std::invalid_argument("bitstring longer than 62 bits");
  BitString x = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bad bitstring: " + s);
    x = (x << 1) | static_cast<BitString>(c == '1');
  }
  return x;
}

// Removes the bit of `wire`, closing the gap; the result has width-1 bits.
inline BitString drop_wire(BitString x, int width, int wire) {
  int p = wire_bit_pos(width, wire);
  BitString high = x >> (p + 1);
  BitString low = x & ((BitString{1} << p) - 1);
  return (high << p) | low;
}

// Inverse of drop_wire: inserts `value` as the bit of `wire` in a width-wide string.
inline BitString insert_wire(BitString rest, int width, int wire, bool value) {
  int p = wire_bit_pos(width, wire);
  BitString high = rest >> p;
  BitString low = rest & ((BitString{1} << p) - 1);
  return (high << (p + 1)) | (static_cast<BitString>(value) << p) | low;
}

// Deterministic 64-bit mix used to derive independent per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace stoqlab
