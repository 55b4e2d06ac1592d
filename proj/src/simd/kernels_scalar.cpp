#include "lipemb/simd.hpp"

#include "lipemb/core.hpp"

namespace lipemb::simd {

RowKey make_row_key(std::uint64_t seed, std::uint32_t family, std::int64_t row) {
  const auto s0 = static_cast<std::uint32_t>(seed);
  const auto s1 = static_cast<std::uint32_t>(seed >> 32);
  const std::uint32_t base = fmix32(s0 ^ (family * 0x9E3779B9U) ^ 0x5BD1E995U);
  const auto r0 = static_cast<std::uint32_t>(row);
  const auto r1 = static_cast<std::uint32_t>(static_cast<std::uint64_t>(row) >> 32);
  const std::uint32_t row_mix = fmix32(base ^ (r0 * 0xCC9E2D51U) ^ fmix32(r1 * 0x1B873593U + 0x2545F491U));
  return RowKey{row_mix, fmix32(s1 + 0x68E31DA4U)};
}

namespace {

void hash_words_scalar(RowKey key, std::uint32_t chunk_begin, std::size_t count, std::uint32_t* out) {
  for (std::size_t i = 0; i < count; ++i) out[i] = word_at(key, chunk_begin + static_cast<std::uint32_t>(i));
}

void unpack_bits_scalar(const std::uint32_t* words, std::size_t first_bit, std::size_t nbits, std::uint8_t* out) {
  for (std::size_t i = 0; i < nbits; ++i) {
    const std::size_t b = first_bit + i;
    out[i] = static_cast<std::uint8_t>((words[b >> 5] >> (b & 31)) & 1U);
  }
}

void accumulate_u8_scalar(std::uint16_t* acc, const std::uint8_t* row, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = static_cast<std::uint16_t>(acc[i] + row[i]);
}

std::uint64_t sum_u8_scalar(const std::uint8_t* data, std::size_t n) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) s += data[i];
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", hash_words_scalar, unpack_bits_scalar, accumulate_u8_scalar, sum_u8_scalar};
  return table;
}

}  // namespace lipemb::simd
