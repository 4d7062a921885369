#pragma once

// Seedable 64-bit hashing (XXH64) and the derived primitives used by every
// sketch: uniform index draws, geometric ranks, bucket/rank splits, and the
// virtual-slot mapping for shared arrays.

#include <bit>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string_view>

namespace cardsketch {

struct HashSeed {
  std::uint64_t value = 0;
};

namespace detail {

inline constexpr std::uint64_t kPrime1 = 0x9E3779B185EBCA87ULL;
inline constexpr std::uint64_t kPrime2 = 0xC2B2AE3D27D4EB4FULL;
inline constexpr std::uint64_t kPrime3 = 0x165667B19E3779F9ULL;
inline constexpr std::uint64_t kPrime4 = 0x85EBCA77C2B2AE63ULL;
inline constexpr std::uint64_t kPrime5 = 0x27D4EB2F165667C5ULL;

inline std::uint64_t bswap64(std::uint64_t v) {
  return __builtin_bswap64(v);
}

inline std::uint64_t read_u64(const char* p) {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) v = bswap64(v);
  return v;
}

inline std::uint32_t read_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  return v;
}

inline std::uint64_t xx_round(std::uint64_t acc, std::uint64_t input) {
  acc += input * kPrime2;
  acc = std::rotl(acc, 31);
  acc *= kPrime1;
  return acc;
}

inline std::uint64_t xx_merge_round(std::uint64_t acc, std::uint64_t val) {
  acc ^= xx_round(0, val);
  acc = acc * kPrime1 + kPrime4;
  return acc;
}

}  // namespace detail

// XXH64 over an arbitrary byte string.
inline std::uint64_t hash64(std::string_view key, HashSeed seed) {
  using namespace detail;
  const char* p = key.data();
  const char* const end = p + key.size();
  std::uint64_t h;

  if (key.size() >= 32) {
    std::uint64_t v1 = seed.value + kPrime1 + kPrime2;
    std::uint64_t v2 = seed.value + kPrime2;
    std::uint64_t v3 = seed.value;
    std::uint64_t v4 = seed.value - kPrime1;
    do {
      v1 = xx_round(v1, read_u64(p));
      v2 = xx_round(v2, read_u64(p + 8));
      v3 = xx_round(v3, read_u64(p + 16));
      v4 = xx_round(v4, read_u64(p + 24));
      p += 32;
    } while (p + 32 <= end);
    h = std::rotl(v1, 1) + std::rotl(v2, 7) + std::rotl(v3, 12) + std::rotl(v4, 18);
    h = xx_merge_round(h, v1);
    h = xx_merge_round(h, v2);
    h = xx_merge_round(h, v3);
    h = xx_merge_round(h, v4);
  } else {
    h = seed.value + kPrime5;
  }

  h += static_cast<std::uint64_t>(key.size());

  while (p + 8 <= end) {
    h ^= xx_round(0, read_u64(p));
    h = std::rotl(h, 27) * kPrime1 + kPrime4;
    p += 8;
  }
  if (p + 4 <= end) {
    h ^= static_cast<std::uint64_t>(read_u32(p)) * kPrime1;
    h = std::rotl(h, 23) * kPrime2 + kPrime3;
    p += 4;
  }
  while (p < end) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(*p)) * kPrime5;
    h = std::rotl(h, 11) * kPrime1;
    ++p;
  }

  h ^= h >> 33;
  h *= kPrime2;
  h ^= h >> 29;
  h *= kPrime3;
  h ^= h >> 32;
  return h;
}

// Cheap integer finalizer for internal seed derivation (splitmix64 mix).
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// Independent sub-seed for a named role (item hash, slot family, pair hash...).
inline HashSeed derive_seed(HashSeed base, std::string_view tag) {
  return HashSeed{hash64(tag, base)};
}

// Uniform draw in [1, range].
inline std::uint64_t uniform_index(std::string_view key, std::uint64_t range, HashSeed seed) {
  if (range == 0) throw std::invalid_argument("uniform_index: range must be positive");
  return hash64(key, seed) % range + 1;
}

// Uniform cell index in [0, range) from a 64-bit hash. The fixed-point
// multiply keeps the map uniform to range/2^64 and stays off the hardware
// divider, which matters on per-edge update paths.
inline std::uint64_t cell_from_bits(std::uint64_t h, std::uint64_t range) {
  if (range == 0) throw std::invalid_argument("cell_from_bits: range must be positive");
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(h) * range) >> 64);
}

// Position of the first set bit among the top `width` bits of `bits`, 1-based,
// capped at `width` (the cap absorbs the all-zero tail so ranks stay in range).
inline int rank_from_bits(std::uint64_t bits, int width) {
  if (width < 1 || width > 64) throw std::invalid_argument("rank_from_bits: width must be in [1,64]");
  const int lz = bits == 0 ? 64 : std::countl_zero(bits);
  return lz >= width ? width : lz + 1;
}

struct BucketRank {
  std::uint64_t bucket;  // 1-based
  int rank;              // 1-based geometric rank
};

// Split a 64-bit hash into a bucket index over m buckets and a geometric
// rank. Fixed-point multiply: the integer part of (h / 2^64) * m is an
// exactly uniform bucket, and the fractional remainder stays uniform and
// independent of it, so ranks follow the 2^-k law in every bucket even when
// m is not a power of two. (Folding the top ceil(log2 m) hash bits mod m
// would give the low buckets up to double mass, which skews any estimator
// that assumes uniform bucket choice.)
inline BucketRank split_from_bits(std::uint64_t h, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("split_from_bits: m must be positive");
  const unsigned __int128 scaled = static_cast<unsigned __int128>(h) * m;
  const std::uint64_t bucket = static_cast<std::uint64_t>(scaled >> 64) + 1;
  const std::uint64_t leftover = static_cast<std::uint64_t>(scaled);
  return {bucket, rank_from_bits(leftover, 64)};
}

inline BucketRank split_hash(std::string_view key, std::uint64_t m, HashSeed seed) {
  return split_from_bits(hash64(key, seed), m);
}

// Geometric rank over the full 64 hash bits: P(rank = k) = 2^-k.
inline int geometric_rank(std::string_view key, HashSeed seed) {
  return rank_from_bits(hash64(key, seed), 64);
}

// Stable per-user digest used to key virtual-slot draws.
inline std::uint64_t user_digest(std::string_view user, HashSeed seed) {
  return hash64(user, seed);
}

// Slot `i` of a user's virtual sketch inside a shared array of `range` cells:
// a fresh uniform draw keyed by (slot, user digest).
inline std::uint64_t virtual_position(std::uint64_t digest, std::uint32_t slot,
                                      std::uint64_t range, HashSeed seed) {
  char buf[12];
  std::uint32_t s = slot;
  std::uint64_t d = digest;
  if constexpr (std::endian::native == std::endian::big) {
    s = __builtin_bswap32(s);
    d = detail::bswap64(d);
  }
  std::memcpy(buf, &s, 4);
  std::memcpy(buf + 4, &d, 8);
  return uniform_index(std::string_view(buf, sizeof(buf)), range, seed);
}

// Hash of a (user, item) pair via chaining: the user hash seeds the item hash,
// so each user induces an independent hash function over items.
inline std::uint64_t pair_hash(std::string_view user, std::string_view item, HashSeed seed) {
  return hash64(item, HashSeed{hash64(user, seed)});
}

}  // namespace cardsketch
