#pragma once

#include <cstdint>
#include <string>

namespace ome {

// FNV-1a 64-bit over a canonical description string; provenance digests.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(const std::string& s);

}  // namespace ome
