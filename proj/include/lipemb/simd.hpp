#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

// Data-parallel inner loops used by field sampling and level-0 block
// classification. Each kernel has a scalar reference implementation and, on
// x86-64, an AVX2 variant selected at runtime. Both must produce bit-identical
// output; the equivalence tests enforce this.

namespace lipemb::simd {

// Per-word key derived from (seed, family, row). The column chunk index is the
// only per-lane input, so a row's words can be generated in parallel.
struct RowKey {
  std::uint32_t row_mix;  // depends on seed, family, row
  std::uint32_t seed_hi;  // high half of the seed
};

RowKey make_row_key(std::uint64_t seed, std::uint32_t family, std::int64_t row);

// One 32-bit word of the field for chunk index `chunk` (32 sites per chunk).
// Shared definition for all kernel variants.
inline std::uint32_t word_at(const RowKey& k, std::uint32_t chunk) {
  auto f = [](std::uint32_t h) {
    h ^= h >> 16;
    h *= 0x85EBCA6BU;
    h ^= h >> 13;
    h *= 0xC2B2AE35U;
    h ^= h >> 16;
    return h;
  };
  return f(f(chunk * 0x27D4EB2FU + k.row_mix) ^ k.seed_hi);
}

struct KernelTable {
  std::string_view name;
  // out[i] = word_at(key, chunk_begin + i) for i < count.
  void (*hash_words)(RowKey key, std::uint32_t chunk_begin, std::size_t count, std::uint32_t* out);
  // out[i] = bit (first_bit + i) of the little-endian word stream, as 0/1 bytes.
  void (*unpack_bits)(const std::uint32_t* words, std::size_t first_bit, std::size_t nbits, std::uint8_t* out);
  // acc[i] += row[i].
  void (*accumulate_u8)(std::uint16_t* acc, const std::uint8_t* row, std::size_t n);
  // Sum of n bytes.
  std::uint64_t (*sum_u8)(const std::uint8_t* data, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

// Active table: AVX2 when available unless LIPEMB_SIMD=scalar is set in the
// environment at first use.
const KernelTable& kernels();

}  // namespace lipemb::simd
