#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fluocnn {

using Rng = std::mt19937_64;

/// Derives independent, order-free random sub-streams from one run seed.
///
///     auto rng = SeedKey(seed).mix("spectrum").mix(oil_id).mix(rep).rng();
///
/// The derived value depends only on the sequence of mixed-in parts, so
/// work can be scheduled in any order (or in parallel) without changing
/// the numbers any single unit sees.
class SeedKey {
 public:
  explicit SeedKey(std::uint64_t seed);

  SeedKey& mix(std::string_view part);
  SeedKey& mix(std::int64_t part);

  std::uint64_t value() const;
  Rng rng() const { return Rng(value()); }

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace fluocnn
