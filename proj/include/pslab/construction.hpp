#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "pslab/admissible.hpp"

namespace pslab {

struct ConstructionParams {
    double lambda = 1.0;
    int m = 0;
    double C = 1.0;  // sieve-theorem constant; no numeric value exists, configurable
    int k = 0;
    std::vector<double> betas;  // beta_i = 2^{i-k} * lambda, ascending
    double v = 1.0;
    double y = 0;
    double z = 0;
    uint64_t B = 1;
    bool override_mode = false;  // explicit (k, y, z, B) instead of the asymptotic formulas
};

// Smallest k with k >= C, k >= e^2 and k >= e^{2Cm}. lambda plays no role in
// the choice; the parameter is kept for interface symmetry with the pipeline.
int choose_k(double lambda, int m, double C);

// Asymptotic parameter formulas. They reject every representable x (v < 1
// always at desk scale), so failures return a diagnostic naming the violated
// inequality together with the computed values; nothing is clamped.
struct ParamCheck {
    bool ok = false;
    std::string violated;  // empty when ok
    ConstructionParams params;
};
ParamCheck derive_params(double x, double lambda, int m, double C);

// The supported desk path: take (k, y, z, B) directly.
ConstructionParams override_params(int k, double y, double z, uint64_t B,
                                   double lambda = 1.0, int m = 0, double C = 1.0);

// p -> a_p for every prime p <= y with p coprime to B.
struct ResidueAssignment {
    std::map<uint64_t, uint64_t> classes;
};

struct SieveResidueResult {
    ResidueAssignment residues;
    std::vector<int64_t> survivors;  // [z] minus the union of classes, ascending
    uint64_t seed = 0;
    int restarts_used = 0;
};

// Chooses residue classes whose survivor set in {1..floor(z)} has size
// exactly k and is admissible. Greedy by kill count (capped so the survivor
// count never drops below k), ties by smallest residue; randomized restarts
// with substreams of `seed` when the greedy strands extra survivors. When
// targets are given, the survivor nearest each target is protected and the
// final set is exactly those k elements.
SieveResidueResult sieve_residues(double y, double z, uint64_t B, int k,
                                  const std::vector<double>& targets = {},
                                  uint64_t seed = 1, int max_restarts = 20000);

// g = product of the domain primes, h in [0, g) with h == -a_p (mod p).
std::pair<mpz_class, mpz_class> crt_combine(const ResidueAssignment& residues);

// L_i(n) = g*n + h + h_i; throws InternalError if the result is not
// admissible (that would mean the construction itself is broken).
LinearSystem build_system(const mpz_class& g, const mpz_class& h, const OffsetTuple& offsets);

// Exact check of the survivor identity {h_1..h_k} = [z] \ union a_p (p).
bool verify_survivors(const ResidueAssignment& residues, double z, const OffsetTuple& offsets);

struct Construction {
    ConstructionParams params;
    ResidueAssignment residues;
    OffsetTuple offsets;
    mpz_class g;
    mpz_class h;  // 0 <= h < g
    uint64_t seed = 0;

    LinearSystem system() const;
    std::string to_json() const;
    static Construction from_json(const std::string& text);
};

// Full pipeline from parameters to a verified construction.
Construction make_construction(const ConstructionParams& params,
                               const std::vector<double>& targets = {},
                               uint64_t seed = 1);

// Window identity audit for one sample n: every non-survivor position t in
// [1, floor(z)] carries a divisor certificate p | g*n + h + t (exact), and
// each offset position gets a primality verdict.
struct WindowSampleRecord {
    mpz_class n;
    mpz_class window_start;                            // g*n + h
    std::vector<std::pair<int64_t, uint64_t>> certificates;  // (t, certifying p)
    std::vector<std::pair<int64_t, bool>> offset_primality;  // (h_i, probably prime)
    bool all_certified = false;
};
struct WindowIdentityReport {
    std::vector<WindowSampleRecord> samples;
    bool all_ok = false;
};
WindowIdentityReport verify_window_identity(const Construction& c,
                                            const std::vector<mpz_class>& n_samples,
                                            int rounds = 40);

// Bookkeeping around the headline count: X = 4*g*x, eps(X), the claimed
// count in log form, and log g against y. No claim of proof.
struct TheoremReport {
    mpz_class X;           // meaningful when x is integral
    double log_X = 0;
    double epsilon_X = 0;  // (log_4 X)^2 / log_3 X
    double log_X_power = 0;        // (1 - eps) * log X
    double log_claimed_count = 0;  // log( x / (e^C log x)^k )
    double log_g = 0;
    double y = 0;
};
TheoremReport theorem_report(const Construction& c, double x);

}  // namespace pslab
