#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <set>

#include "oracles.hpp"
#include "pslab/errors.hpp"
#include "pslab/primality.hpp"
#include "pslab/rng.hpp"
#include "pslab/sieve.hpp"

using namespace pslab;

TEST_CASE("frozen small examples") {
    // sieve_range(0,16) query set -> {2,3,5,7,11,13}
    auto segs = sieve_collect(0, 16);
    std::set<uint64_t> found;
    for (uint64_t n = 0; n < 16; ++n)
        for (const auto& s : segs)
            if (s.covers(n) && s.query(n)) found.insert(n);
    CHECK(found == std::set<uint64_t>{2, 3, 5, 7, 11, 13});

    CHECK(sieve_collect(10, 10).empty());

    // count over [10^6, 10^6 + 100) -> 6 primes (trial division oracle)
    CHECK(count_primes(1000000 - 1, 1000000 + 99) ==
          oracle::count_primes_naive(1000000 - 1, 1000000 + 99));
    CHECK(count_primes(1000000 - 1, 1000000 + 99) == 6);

    CHECK(count_primes(1, 10) == 4);
    CHECK(count_primes(10, 10) == 0);
    CHECK(count_primes(1, 100) == 25);

    CHECK(primes_in_vec(100, 120) == std::vector<uint64_t>{101, 103, 107, 109, 113});
    CHECK(primes_in_vec(0, 2) == std::vector<uint64_t>{2});
    CHECK(primes_in_vec(24, 28).empty());
}

TEST_CASE("oracle equivalence: segment queries vs trial division to 10^6") {
    auto segs = sieve_collect(0, 1u << 20);
    size_t idx = 0;
    uint64_t mismatches = 0;
    for (uint64_t n = 0; n < (1u << 20); ++n) {
        while (!segs[idx].covers(n)) ++idx;
        if (segs[idx].query(n) != oracle::trial_division_is_prime(n)) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("segment independence: one pass equals split passes at every even cut") {
    const uint64_t lo = 5000, hi = 7000;
    auto whole = sieve_collect(lo, hi, {.segment_cap = 1 << 20});
    auto query = [](const std::vector<PrimeSegment>& segs, uint64_t n) {
        for (const auto& s : segs)
            if (s.covers(n)) return s.query(n);
        REQUIRE(false);
        return false;
    };
    for (uint64_t cut = 5002; cut < hi; cut += 256) {
        auto a = sieve_collect(lo, cut);
        auto b = sieve_collect(cut, hi);
        std::vector<PrimeSegment> split = a;
        split.insert(split.end(), b.begin(), b.end());
        for (uint64_t n = lo; n < hi; ++n)
            REQUIRE(query(split, n) == query(whole, n));
    }
}

TEST_CASE("count_primes equals primes_in length on random ranges under 10^9") {
    rng::Stream s(2024);
    for (int trial = 0; trial < 60; ++trial) {
        uint64_t lo = s.next_below(1000000000ull);
        uint64_t hi = lo + s.next_below(200000);
        uint64_t n = 0;
        primes_in(lo, hi, [&](uint64_t) { ++n; });
        CHECK(count_primes(lo, hi) == n);
    }
}

TEST_CASE("parallel sieving is deterministic") {
    SieveConfig seq{.segment_cap = 1 << 14, .threads = 1};
    SieveConfig par{.segment_cap = 1 << 14, .threads = 4};
    auto a = sieve_collect(0, 1 << 17, seq);
    auto b = sieve_collect(0, 1 << 17, par);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].base == b[i].base);
        CHECK(a[i].span == b[i].span);
        CHECK(a[i].bits == b[i].bits);
    }
    CHECK(count_primes(0, 1 << 22, seq) == count_primes(0, 1 << 22, par));
}

TEST_CASE("odd lo and odd spans are handled") {
    CHECK(count_primes(2, 3) == 1);
    CHECK(count_primes(3, 5) == 1);
    auto segs = sieve_collect(7, 20);
    for (uint64_t n = 7; n < 20; ++n)
        for (const auto& s : segs)
            if (s.covers(n)) CHECK(s.query(n) == oracle::trial_division_is_prime(n));
}

TEST_CASE("is_prime_small: examples, edge cases, oracle sweep") {
    CHECK_FALSE(is_prime_small(0));
    CHECK_FALSE(is_prime_small(1));
    CHECK(is_prime_small(2));
    CHECK(is_prime_small(97));
    CHECK_FALSE(is_prime_small(91));  // 7 * 13
    CHECK(is_prime_small((uint64_t{1} << 61) - 1));
    CHECK_FALSE(is_prime_small(uint64_t{3215031751ull}));  // strong pseudoprime to 2,3,5,7
    for (uint64_t n = 0; n < 20000; ++n)
        REQUIRE(is_prime_small(n) == oracle::trial_division_is_prime(n));
    CHECK(is_prime_small(18446744073709551557ull));  // largest prime below 2^64
    CHECK_FALSE(is_prime_small(18446744073709551555ull));
}

TEST_CASE("is_prime_big: verdicts, witnesses, agreement with is_prime_small") {
    CHECK(is_prime_big(0).verdict == Verdict::kComposite);
    CHECK(is_prime_big(1).verdict == Verdict::kComposite);
    CHECK(is_prime_big(2).probably_prime());
    auto v217 = is_prime_big(217);
    CHECK(v217.verdict == Verdict::kComposite);
    REQUIRE(v217.witness.has_value());
    CHECK(*v217.witness == 7);

    mpz_class mersenne61 = (mpz_class(1) << 61) - 1;
    CHECK(is_prime_big(mersenne61).probably_prime());
    CHECK(is_prime_small(mersenne61.get_ui()));

    rng::Stream s(99);
    for (int i = 0; i < 20000; ++i) {
        uint64_t n = s.next_u64() >> (i % 32);
        mpz_class nz;
        mpz_import(nz.get_mpz_t(), 1, 1, sizeof n, 0, 0, &n);
        CHECK(is_prime_big(nz).probably_prime() == is_prime_small(n));
    }
    for (uint64_t n : {1000000016000000063ull, 4294967297ull, 600851475143ull}) {
        mpz_class nz;
        mpz_import(nz.get_mpz_t(), 1, 1, sizeof n, 0, 0, &n);
        auto v = is_prime_big(nz);
        if (v.witness) {
            CHECK(*v.witness > 1);
            CHECK(*v.witness < nz);
            CHECK(mpz_divisible_p(nz.get_mpz_t(), v.witness->get_mpz_t()));
        }
    }
    CHECK_THROWS_AS(is_prime_big(-1), ArgumentError);
    CHECK_THROWS_AS(is_prime_big(5, 0), ArgumentError);
}

TEST_CASE("segment cache round trip") {
    auto segs = sieve_collect(0, 100000, {.segment_cap = 1 << 14});
    std::string path = "/tmp/pslab_test_cache.seg";
    write_segment_cache(path, segs);
    auto back = read_segment_cache(path);
    REQUIRE(back.size() == segs.size());
    for (size_t i = 0; i < segs.size(); ++i) {
        CHECK(back[i].base == segs[i].base);
        CHECK(back[i].span == segs[i].span);
        CHECK(back[i].bits == segs[i].bits);
    }
    std::remove(path.c_str());
}

TEST_CASE("cache rejects a bad magic") {
    std::string path = "/tmp/pslab_bad_cache.seg";
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fwrite("NOTMAGIC", 1, 8, f);
    std::fclose(f);
    CHECK_THROWS_AS(read_segment_cache(path), ResourceError);
    std::remove(path.c_str());
}

TEST_CASE("argument and resource errors") {
    CHECK_THROWS_AS(count_primes(10, 5), ArgumentError);
    CHECK_THROWS_AS(sieve_collect(0, (uint64_t{1} << 34) + 4), ResourceError);
    SieveConfig tiny{.segment_cap = 8, .threads = 1};
    CHECK_THROWS_AS(sieve_collect(0, 100, tiny), ArgumentError);
}
