#include "ome/core/digest.hpp"

#include <cstdio>

namespace ome {

std::string digest_hex(const std::string& s) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

}  // namespace ome
