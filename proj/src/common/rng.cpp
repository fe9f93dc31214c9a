#include "common/rng.hpp"

#include <cstdlib>

namespace ufu {

Rng Rng::from_env_or_random() {
  if (const char* env = std::getenv("UFU_FORGE_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return Rng(static_cast<std::uint64_t>(v));
  }
  std::random_device rd;
  return Rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
}

std::string Rng::alnum(std::size_t length) {
  static const char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(alphabet) - 2);
  std::string out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(alphabet[pick(gen_)]);
  return out;
}

} // namespace ufu
