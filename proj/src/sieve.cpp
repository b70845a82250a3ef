#include "pslab/sieve.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <thread>

#include "pslab/errors.hpp"
#include "pslab/kernels.hpp"

namespace pslab {

namespace {

constexpr uint64_t kMaxHi = uint64_t{1} << 63;
// Base primes live in a flat byte sieve; sqrt(hi) beyond this would blow the
// memory budget and is out of desk scope anyway.
constexpr uint64_t kMaxBasePrime = uint64_t{1} << 27;

uint64_t isqrt_u64(uint64_t n) {
    uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// Wheel mod 30: gaps between consecutive residues coprime to 30, starting
// from residue 1: 1 -> 7 -> 11 -> 13 -> 17 -> 19 -> 23 -> 29 -> 31.
constexpr int kWheelGap[8] = {6, 4, 2, 4, 2, 4, 6, 2};
// For r = q0 mod 30, how much to add to reach the nearest wheel residue >= r,
// and the index into kWheelGap of the step that follows it.
struct WheelEntry { uint8_t add; uint8_t idx; };
constexpr WheelEntry wheel_entry(int r) {
    constexpr int res[8] = {1, 7, 11, 13, 17, 19, 23, 29};
    for (int i = 0; i < 8; ++i)
        if (res[i] >= r) return {static_cast<uint8_t>(res[i] - r), static_cast<uint8_t>(i)};
    return {static_cast<uint8_t>(31 - r), 0};
}
constexpr std::array<WheelEntry, 30> make_wheel_table() {
    std::array<WheelEntry, 30> t{};
    for (int r = 0; r < 30; ++r) t[r] = wheel_entry(r);
    return t;
}
constexpr auto kWheel = make_wheel_table();

void clear_bit(std::vector<uint64_t>& w, uint64_t i) { w[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
bool test_bit(const std::vector<uint64_t>& w, uint64_t i) { return (w[i >> 6] >> (i & 63)) & 1; }

// Sieve one segment [base, base+span), base even, using the shared base primes.
PrimeSegment sieve_segment(uint64_t base, uint64_t span,
                           const std::vector<uint32_t>& base_primes) {
    PrimeSegment seg;
    seg.base = base;
    seg.span = span;
    uint64_t nbits = seg.num_bits();
    seg.bits.assign(kernels::words_for_bits(nbits), ~uint64_t{0});
    if (nbits % 64)
        seg.bits.back() = ~uint64_t{0} >> (64 - nbits % 64);
    if (nbits == 0) { seg.bits.clear(); return seg; }

    const uint64_t end = base + span;
    for (uint32_t p : base_primes) {
        uint64_t p2 = uint64_t{p} * p;
        if (p2 >= end) break;
        if (p == 3 || p == 5) {
            // Mark every odd multiple of p from max(p^2, first in segment).
            uint64_t c = std::max(p2, ((base + p) / (2 * p)) * (2 * p) + p);
            if (c < base + 1) c += 2 * p;
            for (; c < end; c += 2 * p) clear_bit(seg.bits, (c - base - 1) / 2);
        } else {
            // Mark p*q for q >= p coprime to 30; smaller factors of q are
            // covered by the 3 and 5 loops above.
            uint64_t q = std::max<uint64_t>(p, (base + p) / p);  // first q with p*q > base
            WheelEntry e = kWheel[q % 30];
            q += e.add;
            int idx = e.idx;
            uint64_t c = p * q;
            while (c < end) {
                clear_bit(seg.bits, (c - base - 1) / 2);
                c += uint64_t{p} * kWheelGap[idx];
                idx = (idx + 1) & 7;
            }
        }
    }
    if (base == 0) clear_bit(seg.bits, 0);  // 1 is not prime
    return seg;
}

std::vector<uint32_t> base_primes_for(uint64_t hi) {
    if (hi < 3) return {};
    uint64_t limit = isqrt_u64(hi - 1);
    if (limit > kMaxBasePrime)
        throw ResourceError("sieve: sqrt(hi) exceeds the base-prime budget");
    return base_primes_upto(limit);
}

struct SegmentPlan { uint64_t base, span; };

std::vector<SegmentPlan> plan_segments(uint64_t lo, uint64_t hi, uint64_t cap) {
    std::vector<SegmentPlan> plan;
    uint64_t base = lo & ~uint64_t{1};
    while (base < hi) {
        uint64_t span = std::min(cap, hi - base);
        if (base + span < hi && span & 1) --span;  // keep interior boundaries even
        plan.push_back({base, span});
        base += span;
    }
    return plan;
}

}  // namespace

bool PrimeSegment::query(uint64_t n) const {
    if (n == 2) return true;
    if (n < 2 || n % 2 == 0) return false;
    return test_bit(bits, (n - base - 1) / 2);
}

uint64_t PrimeSegment::count_odd_in(uint64_t lo, uint64_t hi) const {
    uint64_t a = std::max(lo + 1, std::max<uint64_t>(base, 3));
    uint64_t b = std::min(hi, end() - 1);
    if (a > b) return 0;
    if (a % 2 == 0) ++a;
    if (b % 2 == 0) --b;
    if (a > b) return 0;
    return kernels::popcount_range(bits.data(), (a - base - 1) / 2, (b - base - 1) / 2 + 1);
}

void PrimeSegment::for_each_odd_prime(const std::function<void(uint64_t)>& f) const {
    uint64_t nb = num_bits();
    for (uint64_t w = 0; w < bits.size(); ++w) {
        uint64_t word = bits[w];
        while (word) {
            uint64_t i = w * 64 + static_cast<uint64_t>(std::countr_zero(word));
            if (i >= nb) return;
            uint64_t n = base + 2 * i + 1;
            if (n > 2) f(n);
            word &= word - 1;
        }
    }
}

void sieve_range(uint64_t lo, uint64_t hi,
                 const std::function<void(const PrimeSegment&)>& sink,
                 const SieveConfig& cfg) {
    if (hi > kMaxHi) throw ArgumentError("sieve_range: hi exceeds 2^63");
    if (cfg.segment_cap < 64) throw ArgumentError("sieve_range: segment cap too small");
    if (lo >= hi) return;

    auto base_primes = base_primes_for(hi);
    auto plan = plan_segments(lo, hi, cfg.segment_cap);

    int threads = std::max(1, cfg.threads);
    if (threads == 1 || plan.size() == 1) {
        for (auto [base, span] : plan) sink(sieve_segment(base, span, base_primes));
        return;
    }
    // Workers sieve disjoint segments; delivery stays in ascending order so
    // the output is identical to a sequential run.
    std::vector<PrimeSegment> done(plan.size());
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < plan.size(); i = next.fetch_add(1))
                done[i] = sieve_segment(plan[i].base, plan[i].span, base_primes);
        });
    for (auto& th : pool) th.join();
    for (auto& seg : done) sink(seg);
}

std::vector<PrimeSegment> sieve_collect(uint64_t lo, uint64_t hi, const SieveConfig& cfg) {
    if (hi > lo && hi - lo > (uint64_t{1} << 34))
        throw ResourceError("sieve_collect: range too large to hold in memory");
    std::vector<PrimeSegment> out;
    sieve_range(lo, hi, [&](const PrimeSegment& s) { out.push_back(s); }, cfg);
    return out;
}

uint64_t count_primes(uint64_t lo, uint64_t hi, const SieveConfig& cfg) {
    if (lo > hi) throw ArgumentError("count_primes: lo > hi");
    if (lo == hi) return 0;
    uint64_t total = (lo < 2 && hi >= 2) ? 1 : 0;
    sieve_range(lo, hi + 1,
                [&](const PrimeSegment& s) { total += s.count_odd_in(lo, hi); }, cfg);
    return total;
}

void primes_in(uint64_t lo, uint64_t hi, const std::function<void(uint64_t)>& f,
               const SieveConfig& cfg) {
    if (lo > hi) throw ArgumentError("primes_in: lo > hi");
    if (lo == hi) return;
    if (lo < 2 && hi >= 2) f(2);
    sieve_range(lo, hi + 1, [&](const PrimeSegment& s) {
        s.for_each_odd_prime([&](uint64_t p) {
            if (p > lo && p <= hi) f(p);
        });
    }, cfg);
}

std::vector<uint64_t> primes_in_vec(uint64_t lo, uint64_t hi, const SieveConfig& cfg) {
    std::vector<uint64_t> out;
    primes_in(lo, hi, [&](uint64_t p) { out.push_back(p); }, cfg);
    return out;
}

std::vector<uint32_t> base_primes_upto(uint64_t n) {
    std::vector<uint32_t> primes;
    if (n < 3) return primes;
    // index i <-> odd 2i+1
    std::vector<uint8_t> odd((n + 1) / 2, 1);
    odd[0] = 0;
    for (uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= n; ++i) {
        if (!odd[i]) continue;
        uint64_t p = 2 * i + 1;
        for (uint64_t j = (p * p - 1) / 2; j < odd.size(); j += p) odd[j] = 0;
    }
    for (uint64_t i = 1; i < odd.size(); ++i)
        if (odd[i]) primes.push_back(static_cast<uint32_t>(2 * i + 1));
    return primes;
}

void write_segment_cache(const std::string& path, const std::vector<PrimeSegment>& segs) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ResourceError("cannot open cache file for writing: " + path);
    auto put_u64 = [&](uint64_t v) {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
        std::fwrite(b, 1, 8, f);
    };
    std::fwrite("PSLAB001", 1, 8, f);
    for (const auto& s : segs) {
        put_u64(s.base);
        put_u64(s.span);
        uint64_t nbytes = (s.span + 15) / 16;
        for (uint64_t j = 0; j < nbytes; ++j) {
            uint64_t w = j / 8;
            unsigned char byte =
                w < s.bits.size() ? static_cast<unsigned char>(s.bits[w] >> (8 * (j % 8))) : 0;
            std::fputc(byte, f);
        }
    }
    if (std::fclose(f) != 0) throw ResourceError("cache write failed: " + path);
}

std::vector<PrimeSegment> read_segment_cache(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw ResourceError("cannot open cache file: " + path);
    auto get_u64 = [&](uint64_t& v) {
        unsigned char b[8];
        if (std::fread(b, 1, 8, f) != 8) return false;
        v = 0;
        for (int i = 0; i < 8; ++i) v |= uint64_t{b[i]} << (8 * i);
        return true;
    };
    char magic[8];
    if (std::fread(magic, 1, 8, f) != 8 || std::string(magic, 8) != "PSLAB001") {
        std::fclose(f);
        throw ResourceError("bad cache magic: " + path);
    }
    std::vector<PrimeSegment> segs;
    uint64_t base;
    while (get_u64(base)) {
        PrimeSegment s;
        s.base = base;
        if (!get_u64(s.span)) { std::fclose(f); throw ResourceError("truncated cache: " + path); }
        uint64_t nbytes = (s.span + 15) / 16;
        s.bits.assign(kernels::words_for_bits(s.num_bits()), 0);
        for (uint64_t j = 0; j < nbytes; ++j) {
            int c = std::fgetc(f);
            if (c == EOF) { std::fclose(f); throw ResourceError("truncated cache: " + path); }
            uint64_t w = j / 8;
            if (w < s.bits.size()) s.bits[w] |= uint64_t{static_cast<unsigned char>(c)} << (8 * (j % 8));
        }
        segs.push_back(std::move(s));
    }
    std::fclose(f);
    return segs;
}

}  // namespace pslab
