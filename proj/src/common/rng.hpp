#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace ufu {

// Deterministic token source. Seeding it from UFU_FORGE_SEED makes scan
// evidence logs reproducible run-to-run.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Seed from the UFU_FORGE_SEED environment variable when set, otherwise
  // from the system entropy source.
  static Rng from_env_or_random();

  std::uint64_t next() { return gen_(); }

  // Uniform random string over [A-Za-z0-9].
  std::string alnum(std::size_t length);

private:
  std::mt19937_64 gen_;
};

} // namespace ufu
