#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace pslab {

// L(n) = g*n + h with g >= 1. Negative leading coefficients are normalized
// away by the caller (L and -L take the same prime values up to sign).
struct LinearForm {
    mpz_class g = 1;
    mpz_class h = 0;

    mpz_class operator()(const mpz_class& n) const { return g * n + h; }
};

struct LinearSystem {
    std::vector<LinearForm> forms;

    size_t k() const { return forms.size(); }
    static LinearSystem from_offsets(const std::vector<mpz_class>& offsets);
};

// Strictly increasing integer offsets h_1 < ... < h_k.
struct OffsetTuple {
    std::vector<int64_t> offsets;

    size_t k() const { return offsets.size(); }
};

// Solutions modulo p of L_1(n)...L_k(n) == 0. A form with p | g and p | h
// contributes every residue; p | g, p !| h contributes none; otherwise the
// single residue -h * g^-1 mod p.
std::set<uint64_t> occupied_residues(const LinearSystem& sys, uint64_t p);

// True iff every pairwise determinant g_i h_j - g_j h_i is nonzero.
bool are_distinct(const LinearSystem& sys);

// True iff no prime has all residues occupied. Only p <= k need scanning:
// a form with p !| g occupies at most one residue mod p, so a prime p > k
// can only be obstructed when some form is identically 0 mod p, i.e. when
// p divides gcd(g_i, h_i); that case is caught directly.
bool is_admissible(const LinearSystem& sys);

bool is_admissible_offsets(const OffsetTuple& tuple);

// Smallest prime with a complete residue system occupied, or nullopt when
// the system is admissible.
std::optional<uint64_t> admissibility_obstruction(const LinearSystem& sys);

// phi(g*q)/phi(g), an integer: multiply p^e for p^e || q with p | g, and
// phi(p^e) otherwise. Only q is factored (trial division).
mpz_class phi_L(const LinearForm& form, const mpz_class& q);

// Euler phi by trial-division factorization.
mpz_class euler_phi(const mpz_class& n);

// Parse "g h" per line / "0,2,6" offsets shorthand (CLI text formats).
LinearSystem parse_system_text(const std::string& text);
OffsetTuple parse_offsets(const std::string& csv);

}  // namespace pslab
