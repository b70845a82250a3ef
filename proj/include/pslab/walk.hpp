#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "pslab/construction.hpp"

namespace pslab {

// Primality source for walk windows. Implementations report the absolute
// range [lo, hi] they can answer for; window_counts refuses to step outside.
class PrimalityOracle {
public:
    virtual ~PrimalityOracle() = default;
    virtual bool is_prime(const mpz_class& value) = 0;
    virtual bool covers(const mpz_class& lo, const mpz_class& hi) const = 0;
};

// Exact primality via the deterministic 64-bit test; covers [0, 2^63].
std::unique_ptr<PrimalityOracle> small_oracle();

// Probabilistic primality for arbitrary size; unbounded coverage.
std::unique_ptr<PrimalityOracle> big_oracle(int rounds = 40);

// Construction-backed oracle for values g*n + h + t with t in [1, floor(z)]:
// non-survivor positions are composite by divisor certificate (exact), the k
// offset positions fall back to the probabilistic test. Coverage is exactly
// that window, which is what keeps the walk inside certified territory.
std::unique_ptr<PrimalityOracle> construction_oracle(const Construction& c,
                                                     const mpz_class& n, int rounds = 40);

// c_j = #((N_j, N_j + lambda*log N_j] \cap P), N_j = N0 + j.
struct WalkTrace {
    mpz_class N0;
    double lambda = 0;
    int64_t j_start = 0;
    std::vector<uint64_t> counts;  // counts[i] = c_{j_start + i}
    std::optional<int64_t> located_j;

    uint64_t at(int64_t j) const { return counts.at(static_cast<size_t>(j - j_start)); }
    int64_t j_end() const { return j_start + static_cast<int64_t>(counts.size()) - 1; }
};

WalkTrace window_counts(PrimalityOracle& oracle, const mpz_class& N0, double lambda,
                        int64_t j_max, int64_t j_min = 0);

// c_{j+1} >= c_j - 1 for all consecutive pairs (sliding the start by one
// removes at most one prime).
bool check_step_property(const WalkTrace& trace);

// Smallest j at or after the first j0 with c_{j0} >= m such that c_j == m.
// Throws ArgumentError when the walk never reaches m from above.
int64_t find_exact(const WalkTrace& trace, uint64_t m);

struct LocateResult {
    mpz_class n;
    int64_t j = 0;
    mpz_class N_j;
    std::vector<mpz_class> primes_in_window;  // re-verified independently
    WalkTrace trace;
    int64_t walk_end_used = 0;
    bool endpoint_full_checked = false;   // window at j_start held all k forms
    bool endpoint_empty_checked = false;  // window at walk end held none
    bool offsets_span_ok = false;         // h_k - h_1 < -1 + lambda*log x
    bool offsets_range_ok = false;        // 1 < h_1, h_k < -1 + 2*lambda*log x
};

// The deduction engine: walk j = h_1 - 1 .. floor(2*lambda*log N0) (or
// walk_end when given; the certificate oracle also clamps the end to its
// coverage), find the first window with exactly m primes, then recount that
// window by direct primality of every integer in it.
LocateResult locate(const Construction& c, const mpz_class& n, uint64_t m, double x,
                    std::optional<int64_t> walk_end = std::nullopt, int rounds = 40);

// #{n in [x, 2x) : at least m of the system's forms are prime at n}.
uint64_t count_prime_rich(const LinearSystem& sys, const mpz_class& x, uint64_t m,
                          int rounds = 40);

}  // namespace pslab
