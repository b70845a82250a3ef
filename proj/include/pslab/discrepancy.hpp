#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pslab/admissible.hpp"
#include "pslab/sieve.hpp"

namespace pslab {

// Delta_L(x; q, a) = sum over n in [x,2x), n == a (q), of 1_P(L(n))
//                    minus (1/phi(gq)) * sum over I_L(x) = [gx+h, 2gx+h) of 1_P.
// Desk scale: all sums run through the 64-bit sieve, so g*2x + h must fit.
double delta(const LinearForm& form, uint64_t x, uint64_t q, uint64_t a,
             const SieveConfig& cfg = {});

struct MaxDeltaRow {
    uint64_t q = 0;
    std::optional<uint64_t> a_star;  // empty when no a has gcd(L(a), q) = 1
    double max_abs_delta = 0;
};

// Maximizes |Delta| over a in [0, q) with gcd(L(a), q) = 1, one
// residue-bucketed pass over [x, 2x).
MaxDeltaRow max_delta(const LinearForm& form, uint64_t x, uint64_t q,
                      const SieveConfig& cfg = {});

struct DiscrepancyReport {
    LinearForm form;
    uint64_t x = 0;
    uint64_t Q = 0;
    uint64_t B = 1;
    std::vector<MaxDeltaRow> rows;  // q <= Q with gcd(q, B) = 1, ascending
    double total = 0;               // sum of row maxima
    uint64_t main_count = 0;        // primes among L(n), n in [x, 2x)
    double reference_exponent = 1;  // E in main_count / (log x)^E
    double reference_ratio = 0;     // total / (main_count / (log x)^E)
};

DiscrepancyReport discrepancy_sum(const LinearForm& form, uint64_t x, uint64_t Q,
                                  uint64_t B, double reference_exponent = 1.0,
                                  const SieveConfig& cfg = {});

struct LowerBoundReport {
    double left = 0;    // (phi(B)/B) * (phi(g)/g) * main_count
    double right = 0;   // x / (2 log x)
    bool holds = false;
    uint64_t main_count = 0;
};

LowerBoundReport lower_bound_check(const LinearForm& form, uint64_t x, uint64_t B,
                                   const SieveConfig& cfg = {});

}  // namespace pslab
