#pragma once

// Binary snapshots of sketch array state. Layout (all integers little-endian):
//
//   offset  size  field
//   0       4     magic "CSKB"
//   4       1     version (1)
//   5       1     kind (SnapshotKind)
//   6       1     register width (0 for bit arrays)
//   7       1     reserved (0)
//   8       8     physical array length M
//   16      8     virtual size m (equals M for non-virtual sketches)
//   24      8     hash seed
//   32      -     payload: bits packed LSB-first, ceil(M/8) bytes, or
//                 registers packed w bits each LSB-first, ceil(M*w/8) bytes
//
// Running per-user estimates (FreeBS/FreeRS) are not part of the snapshot;
// they are dumped separately as CSV and reloaded sketches start with empty
// estimate tables. Zero counts and harmonic sums are recomputed on load.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "cardsketch/bit_array.hpp"
#include "cardsketch/cse.hpp"
#include "cardsketch/freebs.hpp"
#include "cardsketch/freers.hpp"
#include "cardsketch/hll.hpp"
#include "cardsketch/lpc.hpp"
#include "cardsketch/register_array.hpp"
#include "cardsketch/vhll.hpp"

namespace cardsketch {

enum class SnapshotKind : std::uint8_t {
  lpc = 1,
  hll = 2,
  cse = 3,
  vhll = 4,
  freebs = 5,
  freers = 6,
};

namespace detail {

inline constexpr char kSnapshotMagic[4] = {'C', 'S', 'K', 'B'};
inline constexpr std::uint8_t kSnapshotVersion = 1;

inline void put_u64(std::ostream& os, std::uint64_t v) {
  char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(buf, 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  if (!is) throw std::invalid_argument("snapshot: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(buf[i])) << (8 * i);
  return v;
}

struct SnapshotHeader {
  SnapshotKind kind;
  int width;
  std::uint64_t M;
  std::uint64_t m;
  std::uint64_t seed;
};

inline void write_header(std::ostream& os, SnapshotKind kind, int width, std::uint64_t M,
                         std::uint64_t m, std::uint64_t seed) {
  os.write(kSnapshotMagic, 4);
  const char meta[4] = {static_cast<char>(kSnapshotVersion), static_cast<char>(kind),
                        static_cast<char>(width), 0};
  os.write(meta, 4);
  put_u64(os, M);
  put_u64(os, m);
  put_u64(os, seed);
}

inline SnapshotHeader read_header(std::istream& is, SnapshotKind expected) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
    throw std::invalid_argument("snapshot: bad magic");
  }
  char meta[4];
  is.read(meta, 4);
  if (!is) throw std::invalid_argument("snapshot: truncated header");
  if (static_cast<std::uint8_t>(meta[0]) != kSnapshotVersion) {
    throw std::invalid_argument("snapshot: unsupported version");
  }
  SnapshotHeader h;
  h.kind = static_cast<SnapshotKind>(meta[1]);
  h.width = static_cast<unsigned char>(meta[2]);
  h.M = get_u64(is);
  h.m = get_u64(is);
  h.seed = get_u64(is);
  if (h.kind != expected) throw std::invalid_argument("snapshot: kind mismatch");
  return h;
}

inline void write_bits(std::ostream& os, const BitArray& bits) {
  const std::size_t nbytes = (bits.size() + 7) / 8;
  std::vector<char> out(nbytes, 0);
  const auto words = bits.words();
  for (std::size_t i = 0; i < nbytes; ++i) {
    out[i] = static_cast<char>((words[i >> 3] >> (8 * (i & 7))) & 0xFF);
  }
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

inline BitArray read_bits(std::istream& is, std::size_t size) {
  const std::size_t nbytes = (size + 7) / 8;
  std::vector<char> in(nbytes);
  is.read(in.data(), static_cast<std::streamsize>(nbytes));
  if (!is) throw std::invalid_argument("snapshot: truncated bit payload");
  std::vector<std::uint64_t> words((size + 63) / 64, 0);
  for (std::size_t i = 0; i < nbytes; ++i) {
    words[i >> 3] |= std::uint64_t(static_cast<unsigned char>(in[i])) << (8 * (i & 7));
  }
  BitArray bits(size);
  bits.assign_words(words);
  return bits;
}

inline void write_registers(std::ostream& os, const RegisterArray& regs) {
  const int w = regs.width();
  const std::size_t nbits = regs.size() * static_cast<std::size_t>(w);
  std::vector<unsigned char> out((nbits + 7) / 8, 0);
  std::size_t bit = 0;
  for (std::size_t i = 0; i < regs.size(); ++i, bit += w) {
    const unsigned v = regs.get(i);
    out[bit >> 3] |= static_cast<unsigned char>(v << (bit & 7));
    if ((bit & 7) + w > 8) out[(bit >> 3) + 1] |= static_cast<unsigned char>(v >> (8 - (bit & 7)));
  }
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

inline RegisterArray read_registers(std::istream& is, std::size_t size, int width) {
  const std::size_t nbits = size * static_cast<std::size_t>(width);
  std::vector<unsigned char> in((nbits + 7) / 8);
  is.read(reinterpret_cast<char*>(in.data()), static_cast<std::streamsize>(in.size()));
  if (!is) throw std::invalid_argument("snapshot: truncated register payload");
  RegisterArray regs(size, width);
  std::vector<std::uint8_t> vals(size);
  std::size_t bit = 0;
  const unsigned mask = (1u << width) - 1;
  for (std::size_t i = 0; i < size; ++i, bit += width) {
    unsigned v = in[bit >> 3] >> (bit & 7);
    if ((bit & 7) + width > 8) v |= unsigned(in[(bit >> 3) + 1]) << (8 - (bit & 7));
    vals[i] = static_cast<std::uint8_t>(v & mask);
  }
  regs.assign(vals);
  return regs;
}

}  // namespace detail

inline void save_snapshot(const LpcSketch& s, std::ostream& os) {
  detail::write_header(os, SnapshotKind::lpc, 0, s.size(), s.size(), s.seed().value);
  detail::write_bits(os, s.bits());
}

inline LpcSketch load_lpc_snapshot(std::istream& is) {
  const auto h = detail::read_header(is, SnapshotKind::lpc);
  LpcSketch s(h.M, HashSeed{h.seed});
  s.restore_bits(detail::read_bits(is, h.M));
  return s;
}

inline void save_snapshot(const HllSketch& s, std::ostream& os) {
  detail::write_header(os, SnapshotKind::hll, s.register_width(), s.size(), s.size(),
                       s.seed().value);
  detail::write_registers(os, s.registers());
}

inline HllSketch load_hll_snapshot(std::istream& is) {
  const auto h = detail::read_header(is, SnapshotKind::hll);
  HllSketch s(h.M, HashSeed{h.seed}, h.width);
  s.restore_registers(detail::read_registers(is, h.M, h.width));
  return s;
}

inline void save_snapshot(const CseArray& s, std::ostream& os) {
  detail::write_header(os, SnapshotKind::cse, 0, s.physical_size(), s.virtual_size(),
                       s.seed().value);
  detail::write_bits(os, s.bits());
}

inline CseArray load_cse_snapshot(std::istream& is) {
  const auto h = detail::read_header(is, SnapshotKind::cse);
  CseArray s(h.M, h.m, HashSeed{h.seed});
  s.restore_bits(detail::read_bits(is, h.M));
  return s;
}

inline void save_snapshot(const VhllArray& s, std::ostream& os) {
  detail::write_header(os, SnapshotKind::vhll, s.register_width(), s.physical_size(),
                       s.virtual_size(), s.seed().value);
  detail::write_registers(os, s.registers());
}

inline VhllArray load_vhll_snapshot(std::istream& is) {
  const auto h = detail::read_header(is, SnapshotKind::vhll);
  VhllArray s(h.M, h.m, HashSeed{h.seed}, h.width);
  s.restore_registers(detail::read_registers(is, h.M, h.width));
  return s;
}

inline void save_snapshot(const FreeBsSketch& s, std::ostream& os) {
  detail::write_header(os, SnapshotKind::freebs, 0, s.physical_size(), s.physical_size(),
                       s.seed().value);
  detail::write_bits(os, s.bits());
}

inline FreeBsSketch load_freebs_snapshot(std::istream& is) {
  const auto h = detail::read_header(is, SnapshotKind::freebs);
  FreeBsSketch s(h.M, HashSeed{h.seed});
  s.restore_bits(detail::read_bits(is, h.M));
  return s;
}

inline void save_snapshot(const FreeRsSketch& s, std::ostream& os) {
  detail::write_header(os, SnapshotKind::freers, s.register_width(), s.physical_size(),
                       s.physical_size(), s.seed().value);
  detail::write_registers(os, s.registers());
}

inline FreeRsSketch load_freers_snapshot(std::istream& is) {
  const auto h = detail::read_header(is, SnapshotKind::freers);
  FreeRsSketch s(h.M, HashSeed{h.seed}, h.width);
  s.restore_registers(detail::read_registers(is, h.M, h.width));
  return s;
}

}  // namespace cardsketch
