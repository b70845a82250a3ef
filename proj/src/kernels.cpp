#include "pslab/kernels.hpp"

#include <bit>
#include <cstdlib>

#include "pslab/rng.hpp"

namespace pslab::kernels {

uint64_t popcount_range_scalar(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi) {
    if (bit_lo >= bit_hi) return 0;
    uint64_t w_lo = bit_lo / 64, w_hi = (bit_hi - 1) / 64;
    uint64_t head_mask = ~0ull << (bit_lo % 64);
    uint64_t tail_mask = ~0ull >> (63 - (bit_hi - 1) % 64);
    if (w_lo == w_hi) return std::popcount(words[w_lo] & head_mask & tail_mask);
    uint64_t total = std::popcount(words[w_lo] & head_mask);
    for (uint64_t w = w_lo + 1; w < w_hi; ++w) total += std::popcount(words[w]);
    return total + std::popcount(words[w_hi] & tail_mask);
}

void bernoulli_fill_scalar(uint64_t* words, uint64_t nbits, uint64_t key,
                           uint64_t counter0, uint64_t threshold) {
    uint64_t nwords = words_for_bits(nbits);
    for (uint64_t w = 0; w < nwords; ++w) {
        uint64_t bits = 0;
        uint64_t n = (w + 1 == nwords && nbits % 64) ? nbits % 64 : 64;
        for (uint64_t b = 0; b < n; ++b)
            bits |= static_cast<uint64_t>(rng::at(key, counter0 + w * 64 + b) < threshold) << b;
        words[w] = bits;
    }
}

namespace {

bool pick_avx2() {
    const char* force = std::getenv("PSLAB_FORCE_SCALAR");
    if (force && force[0] == '1') return false;
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const bool g_use_avx2 = pick_avx2();

}  // namespace

bool avx2_active() { return g_use_avx2; }
const char* active_impl_name() { return g_use_avx2 ? "avx2" : "scalar"; }

uint64_t popcount_range(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi) {
    return g_use_avx2 ? popcount_range_avx2(words, bit_lo, bit_hi)
                      : popcount_range_scalar(words, bit_lo, bit_hi);
}

void bernoulli_fill(uint64_t* words, uint64_t nbits, uint64_t key,
                    uint64_t counter0, uint64_t threshold) {
    if (g_use_avx2)
        bernoulli_fill_avx2(words, nbits, key, counter0, threshold);
    else
        bernoulli_fill_scalar(words, nbits, key, counter0, threshold);
}

}  // namespace pslab::kernels
