// AVX2 variants of the bit kernels. Compiled with -mavx2 on x86-64; on other
// targets the entry points forward to the scalar reference.

#include "pslab/kernels.hpp"
#include "pslab/rng.hpp"

#include <bit>

#if defined(__x86_64__) || defined(__i386__)
#define PSLAB_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define PSLAB_HAVE_AVX2_TU 0
#endif

namespace pslab::kernels {

#if PSLAB_HAVE_AVX2_TU

namespace {

// Nibble-LUT popcount of one 256-bit vector, accumulated as 4 x u64.
inline __m256i popcount256(__m256i v) {
    const __m256i lookup = _mm256_setr_epi8(
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
        0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    __m256i lo = _mm256_and_si256(v, low_mask);
    __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo),
                                  _mm256_shuffle_epi8(lookup, hi));
    return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

// (a * b) mod 2^64 per lane; AVX2 has no 64-bit mullo, so build it from
// 32x32 partial products.
inline __m256i mullo64(__m256i a, __m256i b) {
    __m256i a_hi = _mm256_srli_epi64(a, 32);
    __m256i b_hi = _mm256_srli_epi64(b, 32);
    __m256i lolo = _mm256_mul_epu32(a, b);
    __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(a, b_hi),
                                     _mm256_mul_epu32(a_hi, b));
    return _mm256_add_epi64(lolo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64x4(__m256i z) {
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 30));
    z = mullo64(z, _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull)));
    z = _mm256_xor_si256(z, _mm256_srli_epi64(z, 27));
    z = mullo64(z, _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull)));
    return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

}  // namespace

uint64_t popcount_range_avx2(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi) {
    if (bit_lo >= bit_hi) return 0;
    uint64_t w_lo = bit_lo / 64, w_hi = (bit_hi - 1) / 64;
    uint64_t head_mask = ~0ull << (bit_lo % 64);
    uint64_t tail_mask = ~0ull >> (63 - (bit_hi - 1) % 64);
    if (w_lo == w_hi) return std::popcount(words[w_lo] & head_mask & tail_mask);

    uint64_t total = std::popcount(words[w_lo] & head_mask);
    uint64_t w = w_lo + 1;
    __m256i acc = _mm256_setzero_si256();
    for (; w + 4 <= w_hi; w += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(words + w));
        acc = _mm256_add_epi64(acc, popcount256(v));
    }
    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    total += lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; w < w_hi; ++w) total += std::popcount(words[w]);
    return total + std::popcount(words[w_hi] & tail_mask);
}

void bernoulli_fill_avx2(uint64_t* words, uint64_t nbits, uint64_t key,
                         uint64_t counter0, uint64_t threshold) {
    const uint64_t full_words = nbits / 64;
    const __m256i sign = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
    const __m256i thr = _mm256_xor_si256(
        _mm256_set1_epi64x(static_cast<long long>(threshold)), sign);
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * rng::kGolden));

    // state lane j holds key + (counter + 1 + j) * golden for the next 4 counters
    uint64_t c1 = counter0 + 1;
    __m256i state = _mm256_add_epi64(
        _mm256_set1_epi64x(static_cast<long long>(key)),
        _mm256_setr_epi64x(static_cast<long long>(c1 * rng::kGolden),
                           static_cast<long long>((c1 + 1) * rng::kGolden),
                           static_cast<long long>((c1 + 2) * rng::kGolden),
                           static_cast<long long>((c1 + 3) * rng::kGolden)));

    for (uint64_t w = 0; w < full_words; ++w) {
        uint64_t bits = 0;
        for (int j = 0; j < 16; ++j) {
            __m256i z = mix64x4(state);
            state = _mm256_add_epi64(state, step);
            __m256i lt = _mm256_cmpgt_epi64(thr, _mm256_xor_si256(z, sign));
            uint64_t mask4 = static_cast<uint32_t>(
                _mm256_movemask_pd(_mm256_castsi256_pd(lt)));
            bits |= mask4 << (4 * j);
        }
        words[w] = bits;
    }
    if (nbits % 64)
        bernoulli_fill_scalar(words + full_words, nbits % 64, key,
                              counter0 + full_words * 64, threshold);
}

#else  // !PSLAB_HAVE_AVX2_TU

uint64_t popcount_range_avx2(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi) {
    return popcount_range_scalar(words, bit_lo, bit_hi);
}

void bernoulli_fill_avx2(uint64_t* words, uint64_t nbits, uint64_t key,
                         uint64_t counter0, uint64_t threshold) {
    bernoulli_fill_scalar(words, nbits, key, counter0, threshold);
}

#endif

}  // namespace pslab::kernels
