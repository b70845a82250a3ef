#pragma once

#include <cstdint>
#include <optional>

#include <gmpxx.h>

namespace pslab {

// Exact primality for any 64-bit input (deterministic Miller-Rabin witness set).
bool is_prime_small(uint64_t n);

enum class Verdict { kComposite, kProbablyPrime };

struct BigVerdict {
    mpz_class value;
    Verdict verdict = Verdict::kComposite;
    std::optional<mpz_class> witness;  // a proper divisor, when trial division found one

    bool probably_prime() const { return verdict == Verdict::kProbablyPrime; }
};

// Trial division by small primes (collecting a divisor certificate), then
// probabilistic testing with the given number of rounds; a probably-prime
// verdict is wrong with probability at most 4^-rounds. Composite verdicts
// are certain.
BigVerdict is_prime_big(const mpz_class& n, int rounds = 40);

}  // namespace pslab
