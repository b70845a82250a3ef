#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pslab {

// Bit-packed primality table for [base, base + span), base even.
// bit i is set iff base + 2i + 1 is prime; 2 is special-cased in queries.
struct PrimeSegment {
    uint64_t base = 0;
    uint64_t span = 0;
    std::vector<uint64_t> bits;

    uint64_t end() const { return base + span; }
    uint64_t num_bits() const { return span / 2; }
    bool covers(uint64_t n) const { return n >= base && n < end(); }

    // Exact primality for covered n.
    bool query(uint64_t n) const;

    // #{p prime : lo < p <= hi}, restricted to odd p covered by this segment.
    uint64_t count_odd_in(uint64_t lo, uint64_t hi) const;

    void for_each_odd_prime(const std::function<void(uint64_t)>& f) const;
};

struct SieveConfig {
    uint64_t segment_cap = uint64_t{1} << 26;  // integers per segment
    int threads = 1;
};

// Streams segments that together cover [lo, hi) (the first segment may start
// one integer early when lo is odd, so bases stay even). Segments arrive in
// ascending order regardless of threading.
void sieve_range(uint64_t lo, uint64_t hi,
                 const std::function<void(const PrimeSegment&)>& sink,
                 const SieveConfig& cfg = {});

std::vector<PrimeSegment> sieve_collect(uint64_t lo, uint64_t hi,
                                        const SieveConfig& cfg = {});

// pi(hi) - pi(lo): primes in the half-open interval (lo, hi].
uint64_t count_primes(uint64_t lo, uint64_t hi, const SieveConfig& cfg = {});

// Primes in (lo, hi], ascending.
void primes_in(uint64_t lo, uint64_t hi, const std::function<void(uint64_t)>& f,
               const SieveConfig& cfg = {});
std::vector<uint64_t> primes_in_vec(uint64_t lo, uint64_t hi,
                                    const SieveConfig& cfg = {});

// Odd primes <= n by a plain byte sieve; feeds the segment marking loops.
std::vector<uint32_t> base_primes_upto(uint64_t n);

// On-disk segment cache. Layout: 8-byte magic "PSLAB001", then per segment
// base (u64 LE), span (u64 LE), ceil(span/16) payload bytes, LSB-first.
void write_segment_cache(const std::string& path, const std::vector<PrimeSegment>& segs);
std::vector<PrimeSegment> read_segment_cache(const std::string& path);

}  // namespace pslab
