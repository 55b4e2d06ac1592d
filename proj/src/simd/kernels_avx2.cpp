// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "lipemb/simd.hpp"

namespace lipemb::simd {

namespace {

inline __m256i fmix32_x8(__m256i h) {
  h = _mm256_xor_si256(h, _mm256_srli_epi32(h, 16));
  h = _mm256_mullo_epi32(h, _mm256_set1_epi32(static_cast<int>(0x85EBCA6BU)));
  h = _mm256_xor_si256(h, _mm256_srli_epi32(h, 13));
  h = _mm256_mullo_epi32(h, _mm256_set1_epi32(static_cast<int>(0xC2B2AE35U)));
  h = _mm256_xor_si256(h, _mm256_srli_epi32(h, 16));
  return h;
}

void hash_words_avx2(RowKey key, std::uint32_t chunk_begin, std::size_t count, std::uint32_t* out) {
  const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const __m256i mul = _mm256_set1_epi32(0x27D4EB2F);
  const __m256i row_mix = _mm256_set1_epi32(static_cast<int>(key.row_mix));
  const __m256i seed_hi = _mm256_set1_epi32(static_cast<int>(key.seed_hi));
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    __m256i c = _mm256_add_epi32(_mm256_set1_epi32(static_cast<int>(chunk_begin + static_cast<std::uint32_t>(i))), lane);
    __m256i h = _mm256_add_epi32(_mm256_mullo_epi32(c, mul), row_mix);
    h = fmix32_x8(h);
    h = fmix32_x8(_mm256_xor_si256(h, seed_hi));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), h);
  }
  for (; i < count; ++i) out[i] = word_at(key, chunk_begin + static_cast<std::uint32_t>(i));
}

void unpack_bits_avx2(const std::uint32_t* words, std::size_t first_bit, std::size_t nbits, std::uint8_t* out) {
  std::size_t i = 0;
  // Scalar head until the source bit is word aligned.
  while (i < nbits && ((first_bit + i) & 31) != 0) {
    const std::size_t b = first_bit + i;
    out[i] = static_cast<std::uint8_t>((words[b >> 5] >> (b & 31)) & 1U);
    ++i;
  }
  // Each 32-bit word expands into 32 bytes: broadcast, shuffle each source
  // byte into 8 lanes, then test one bit per lane.
  const __m256i shuf = _mm256_setr_epi8(0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3,
                                        3, 3, 3, 3);
  const __m256i bitmask = _mm256_set1_epi64x(static_cast<long long>(0x8040201008040201ULL));
  const __m256i one = _mm256_set1_epi8(1);
  for (; i + 32 <= nbits; i += 32) {
    const std::uint32_t w = words[(first_bit + i) >> 5];
    __m256i v = _mm256_set1_epi32(static_cast<int>(w));
    v = _mm256_shuffle_epi8(v, shuf);
    v = _mm256_and_si256(v, bitmask);
    v = _mm256_cmpeq_epi8(v, bitmask);
    v = _mm256_and_si256(v, one);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), v);
  }
  for (; i < nbits; ++i) {
    const std::size_t b = first_bit + i;
    out[i] = static_cast<std::uint8_t>((words[b >> 5] >> (b & 31)) & 1U);
  }
}

void accumulate_u8_avx2(std::uint16_t* acc, const std::uint8_t* row, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m128i r = _mm_loadu_si128(reinterpret_cast<const __m128i*>(row + i));
    const __m256i w = _mm256_cvtepu8_epi16(r);
    __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(acc + i));
    a = _mm256_add_epi16(a, w);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(acc + i), a);
  }
  for (; i < n; ++i) acc[i] = static_cast<std::uint16_t>(acc[i] + row[i]);
}

std::uint64_t sum_u8_avx2(const std::uint8_t* data, std::size_t n) {
  __m256i total = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    total = _mm256_add_epi64(total, _mm256_sad_epu8(v, zero));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), total);
  std::uint64_t s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) s += data[i];
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", hash_words_avx2, unpack_bits_avx2, accumulate_u8_avx2, sum_u8_avx2};
  return table;
}

}  // namespace lipemb::simd
