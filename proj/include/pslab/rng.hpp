#pragma once

#include <cstdint>

// Counter-based generator: SplitMix64 evaluated at an explicit counter.
// value(key, i) equals the i-th output of the usual sequential SplitMix64
// seeded with `key`, but any position can be computed independently, so
// parallel chunks draw from disjoint counter ranges and still produce the
// exact bit stream of a sequential run. Substreams derive a fresh key by
// mixing a stream tag into the parent key.

namespace pslab::rng {

inline constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

// i-th draw of the stream identified by `key` (i = 0, 1, 2, ...).
inline constexpr uint64_t at(uint64_t key, uint64_t i) {
    return mix64(key + (i + 1) * kGolden);
}

// Key for substream `tag` of the stream identified by `key`.
inline constexpr uint64_t substream(uint64_t key, uint64_t tag) {
    return mix64(key ^ mix64(tag * kGolden + 0x6A09E667F3BCC909ull));
}

// Minimal sequential view over a counter stream.
class Stream {
public:
    explicit Stream(uint64_t key, uint64_t start = 0) : key_(key), next_(start) {}

    uint64_t next_u64() { return at(key_, next_++); }

    // Uniform in [0, n) via rejection-free multiply-shift (Lemire); the bias
    // is < n/2^64, irrelevant for tie-breaking duty.
    uint64_t next_below(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    uint64_t key() const { return key_; }

private:
    uint64_t key_;
    uint64_t next_;
};

}  // namespace pslab::rng
