#include "cpaudit/rng.hpp"

namespace cpaudit {

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ull;
  }
  h ^= base + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
  h ^= h >> 33;
  h *= 0xFF51AFD7ED558CCDull;
  h ^= h >> 33;
  h *= 0xC4CEB9FE1A85EC53ull;
  h ^= h >> 33;
  return h;
}

}  // namespace cpaudit
