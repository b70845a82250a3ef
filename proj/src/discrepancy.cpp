#include "pslab/discrepancy.hpp"

#include <cmath>

#include "pslab/bigutil.hpp"
#include "pslab/errors.hpp"

namespace pslab {

namespace {

struct DeskForm {
    uint64_t g = 1;
    uint64_t h = 0;  // h normalized nonnegative? see below — kept signed
    int64_t h_signed = 0;
};

// The sieve path needs everything in 64 bits: L(n) for n < 2x and the
// interval I_L(x) = [gx + h, 2gx + h).
DeskForm desk_form(const LinearForm& form, uint64_t x) {
    if (form.g < 1) throw ArgumentError("discrepancy: form must have g >= 1");
    mpz_class top = form.g * mpz_class(2) * mpz_class(static_cast<unsigned long>(x)) + form.h;
    if (!fits_u64(top) || form.g * mpz_class(static_cast<unsigned long>(x)) + form.h < 0)
        throw ArgumentError("discrepancy: g*2x + h must stay inside 64 bits and I_L nonnegative");
    DeskForm d;
    d.g = mpz_get_ui(form.g.get_mpz_t());
    d.h_signed = static_cast<int64_t>(mpz_get_si(form.h.get_mpz_t()));
    if (!mpz_fits_slong_p(form.h.get_mpz_t()))
        throw ArgumentError("discrepancy: h too large for desk scale");
    return d;
}

// Primes among L(n) = g n + h for n in [x, 2x), bucketed by n mod q.
// Returns (buckets, total).
std::pair<std::vector<uint64_t>, uint64_t> bucket_counts(const DeskForm& f, uint64_t x,
                                                         uint64_t q, const SieveConfig& cfg) {
    std::vector<uint64_t> buckets(q, 0);
    uint64_t total = 0;
    int64_t lo = static_cast<int64_t>(f.g * x) + f.h_signed;       // L(x)
    int64_t hi = static_cast<int64_t>(f.g * 2 * x) + f.h_signed;   // L(2x), exclusive
    if (lo < 0) lo = 0;
    // Walk primes p in [L(x), L(2x)) and map back to n: p = g n + h.
    primes_in(lo == 0 ? 0 : static_cast<uint64_t>(lo) - 1, static_cast<uint64_t>(hi) - 1,
              [&](uint64_t p) {
                  int64_t num = static_cast<int64_t>(p) - f.h_signed;
                  if (num < 0 || num % static_cast<int64_t>(f.g) != 0) return;
                  uint64_t n = static_cast<uint64_t>(num) / f.g;
                  if (n < x || n >= 2 * x) return;
                  ++buckets[n % q];
                  ++total;
              },
              cfg);
    return {buckets, total};
}

uint64_t interval_prime_count(const DeskForm& f, uint64_t x, const SieveConfig& cfg) {
    // I_L(x) = [gx + h, 2gx + h)
    int64_t lo = static_cast<int64_t>(f.g * x) + f.h_signed;
    int64_t hi = static_cast<int64_t>(f.g * 2 * x) + f.h_signed;
    if (hi <= 0) return 0;
    if (lo < 0) lo = 0;
    return count_primes(lo == 0 ? 0 : static_cast<uint64_t>(lo) - 1,
                        static_cast<uint64_t>(hi) - 1, cfg);
}

uint64_t gcd_u64(uint64_t a, uint64_t b) {
    while (b) { uint64_t t = a % b; a = b; b = t; }
    return a;
}

// gcd(L(a), q) where L(a) may be negative: gcd with |L(a) mod q|.
uint64_t gcd_form_value(const DeskForm& f, uint64_t a, uint64_t q) {
    int64_t v = static_cast<int64_t>(f.g * a) + f.h_signed;
    int64_t r = v % static_cast<int64_t>(q);
    if (r < 0) r += static_cast<int64_t>(q);
    return gcd_u64(static_cast<uint64_t>(r), q);
}

}  // namespace

double delta(const LinearForm& form, uint64_t x, uint64_t q, uint64_t a,
             const SieveConfig& cfg) {
    if (q < 1) throw ArgumentError("delta: q must be >= 1");
    if (x < 1) throw ArgumentError("delta: x must be >= 1");
    DeskForm f = desk_form(form, x);
    a %= q;
    if (gcd_form_value(f, a, q) != 1)
        throw ArgumentError("delta: gcd(L(a), q) must be 1");

    auto [buckets, total] = bucket_counts(f, x, q, cfg);
    (void)total;
    uint64_t main_count = interval_prime_count(f, x, cfg);
    mpz_class phi_gq = euler_phi(form.g * mpz_class(static_cast<unsigned long>(q)));
    return static_cast<double>(buckets[a]) -
           static_cast<double>(main_count) / phi_gq.get_d();
}

MaxDeltaRow max_delta(const LinearForm& form, uint64_t x, uint64_t q,
                      const SieveConfig& cfg) {
    if (q < 1) throw ArgumentError("max_delta: q must be >= 1");
    DeskForm f = desk_form(form, x);
    auto [buckets, total] = bucket_counts(f, x, q, cfg);
    (void)total;
    uint64_t main_count = interval_prime_count(f, x, cfg);
    double expected = static_cast<double>(main_count) /
                      euler_phi(form.g * mpz_class(static_cast<unsigned long>(q))).get_d();

    MaxDeltaRow row;
    row.q = q;
    for (uint64_t a = 0; a < q; ++a) {
        if (gcd_form_value(f, a, q) != 1) continue;
        double d = std::abs(static_cast<double>(buckets[a]) - expected);
        if (!row.a_star || d > row.max_abs_delta) {
            row.a_star = a;
            row.max_abs_delta = d;
        }
    }
    return row;
}

DiscrepancyReport discrepancy_sum(const LinearForm& form, uint64_t x, uint64_t Q,
                                  uint64_t B, double reference_exponent,
                                  const SieveConfig& cfg) {
    if (Q < 1) throw ArgumentError("discrepancy_sum: Q must be >= 1");
    if (B < 1) throw ArgumentError("discrepancy_sum: B must be >= 1");
    DeskForm f = desk_form(form, x);

    DiscrepancyReport rep;
    rep.form = form;
    rep.x = x;
    rep.Q = Q;
    rep.B = B;
    rep.reference_exponent = reference_exponent;
    rep.main_count = interval_prime_count(f, x, cfg);

    // One bucketed pass per q; independent q could parallelize, rows merge in
    // ascending order either way.
    for (uint64_t q = 1; q <= Q; ++q) {
        if (gcd_u64(q, B) != 1) continue;
        auto [buckets, total] = bucket_counts(f, x, q, cfg);
        (void)total;
        double expected = static_cast<double>(rep.main_count) /
                          euler_phi(form.g * mpz_class(static_cast<unsigned long>(q))).get_d();
        MaxDeltaRow row;
        row.q = q;
        for (uint64_t a = 0; a < q; ++a) {
            if (gcd_form_value(f, a, q) != 1) continue;
            double d = std::abs(static_cast<double>(buckets[a]) - expected);
            if (!row.a_star || d > row.max_abs_delta) {
                row.a_star = a;
                row.max_abs_delta = d;
            }
        }
        rep.total += row.max_abs_delta;
        rep.rows.push_back(row);
    }
    double log_x = std::log(static_cast<double>(x));
    double denom = static_cast<double>(rep.main_count) / std::pow(log_x, reference_exponent);
    rep.reference_ratio = denom > 0 ? rep.total / denom : 0.0;
    return rep;
}

LowerBoundReport lower_bound_check(const LinearForm& form, uint64_t x, uint64_t B,
                                   const SieveConfig& cfg) {
    if (B < 1) throw ArgumentError("lower_bound_check: B must be >= 1");
    if (x < 2) throw ArgumentError("lower_bound_check: x must be >= 2");
    DeskForm f = desk_form(form, x);

    // Count primes among L(n) directly over n (no interval detour): the left
    // side of the bound is about the form's own values.
    uint64_t main_count = 0;
    auto [buckets, total] = bucket_counts(f, x, 1, cfg);
    (void)buckets;
    main_count = total;

    LowerBoundReport rep;
    rep.main_count = main_count;
    double phi_ratio_g = euler_phi(form.g).get_d() / form.g.get_d();
    double phi_ratio_B =
        euler_phi(mpz_class(static_cast<unsigned long>(B))).get_d() / static_cast<double>(B);
    rep.left = phi_ratio_B * phi_ratio_g * static_cast<double>(main_count);
    rep.right = static_cast<double>(x) / (2.0 * std::log(static_cast<double>(x)));
    rep.holds = rep.left > rep.right;
    return rep;
}

}  // namespace pslab
