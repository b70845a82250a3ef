#include "pslab/primality.hpp"

#include "pslab/errors.hpp"

namespace pslab {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Strong probable-prime test to base a; n odd, n > 2, d odd, n - 1 = d * 2^s.
bool sprp(uint64_t n, uint64_t a, uint64_t d, int s) {
    a %= n;
    if (a == 0) return true;
    uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_prime_small(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                       29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // Sinclair's base set, verified deterministic for all n < 2^64.
    for (uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull,
                       1795265022ull})
        if (!sprp(n, a, d, s)) return false;
    return true;
}

BigVerdict is_prime_big(const mpz_class& n, int rounds) {
    if (n < 0) throw ArgumentError("is_prime_big: n must be nonnegative");
    if (rounds < 1) throw ArgumentError("is_prime_big: rounds must be >= 1");

    BigVerdict v;
    v.value = n;
    if (n < 2) return v;  // 0 and 1: composite verdict, no proper divisor exists

    // Trial division stage: small prime divisors double as certificates.
    for (uint64_t p = 2; p < 2000; p = (p == 2 ? 3 : p + 2)) {
        if (mpz_class(p) * p > n) break;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            if (n == p) {
                v.verdict = Verdict::kProbablyPrime;  // in fact certain here
                return v;
            }
            v.verdict = Verdict::kComposite;
            v.witness = mpz_class(p);
            return v;
        }
    }
    if (n < 2000ul * 2000ul) {  // trial division was exhaustive
        v.verdict = Verdict::kProbablyPrime;
        return v;
    }

    int r = mpz_probab_prime_p(n.get_mpz_t(), rounds);
    v.verdict = (r > 0) ? Verdict::kProbablyPrime : Verdict::kComposite;
    return v;
}

}  // namespace pslab
