#include "fluocnn/rng.hpp"

#include "fluocnn/text_io.hpp"

namespace fluocnn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedKey::SeedKey(std::uint64_t seed) : state_(splitmix64(seed)) {}

SeedKey& SeedKey::mix(std::string_view part) {
  // Length prefix keeps ("ab","c") and ("a","bc") apart.
  state_ = splitmix64(state_ ^ splitmix64(part.size()));
  state_ = splitmix64(state_ ^ text::fnv1a64(part));
  return *this;
}

SeedKey& SeedKey::mix(std::int64_t part) {
  state_ = splitmix64(state_ ^ splitmix64(static_cast<std::uint64_t>(part) ^
                                          0x5851f42d4c957f2dULL));
  return *this;
}

std::uint64_t SeedKey::value() const { return splitmix64(state_); }

}  // namespace fluocnn
