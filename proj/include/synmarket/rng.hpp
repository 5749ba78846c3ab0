#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace synmarket {

using Rng = std::mt19937_64;

// Stable across platforms and runs, unlike std::hash.
std::uint64_t fnv1a(std::string_view text);

std::uint64_t splitmix64(std::uint64_t x);

// Folds a master seed with any number of stream coordinates into one seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
    return Rng(derive_seed(master, coords));
}

// Domain tags for derived streams.
namespace stream {
inline constexpr std::uint64_t kInit = 0x696e6974;       // "init"
inline constexpr std::uint64_t kMarket = 0x6d6b74;       // "mkt"
inline constexpr std::uint64_t kReproduce = 0x7265707264;  // "reprd"
inline constexpr std::uint64_t kScore = 0x73636f7265;    // "score"
}  // namespace stream

}  // namespace synmarket
