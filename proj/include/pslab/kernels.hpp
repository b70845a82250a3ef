#pragma once

#include <cstdint>
#include <cstddef>

// Bit-vector inner loops shared by the sieve and the Bernoulli model.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the unqualified entry points dispatch once at startup based on CPUID
// (override with PSLAB_FORCE_SCALAR=1). Both variants are exact: the AVX2
// path must produce bit-identical results and is tested against the scalar
// reference over adversarial offsets.

namespace pslab::kernels {

// Population count of bits [bit_lo, bit_hi) in an LSB-first word array.
uint64_t popcount_range(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi);
uint64_t popcount_range_scalar(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi);
uint64_t popcount_range_avx2(const uint64_t* words, uint64_t bit_lo, uint64_t bit_hi);

// Sets bit i (i < nbits) iff rng::at(key, counter0 + i) < threshold.
// Trailing bits of the last word are zeroed. Counters address the stream
// absolutely, so chunked fills with disjoint [counter0, counter0 + nbits)
// ranges reproduce one contiguous fill no matter the schedule.
void bernoulli_fill(uint64_t* words, uint64_t nbits, uint64_t key,
                    uint64_t counter0, uint64_t threshold);
void bernoulli_fill_scalar(uint64_t* words, uint64_t nbits, uint64_t key,
                           uint64_t counter0, uint64_t threshold);
void bernoulli_fill_avx2(uint64_t* words, uint64_t nbits, uint64_t key,
                         uint64_t counter0, uint64_t threshold);

bool avx2_active();               // what the dispatcher selected
const char* active_impl_name();   // "avx2" or "scalar", for run metadata

inline uint64_t words_for_bits(uint64_t nbits) { return (nbits + 63) / 64; }

}  // namespace pslab::kernels
