#include "pslab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pslab/bigutil.hpp"
#include "pslab/errors.hpp"
#include "pslab/primality.hpp"
#include "pslab/stats.hpp"

namespace pslab {

namespace {

class SmallOracle final : public PrimalityOracle {
public:
    bool is_prime(const mpz_class& v) override {
        if (!fits_u64(v)) throw ArgumentError("small oracle: value exceeds 64 bits");
        return is_prime_small(v.get_ui());
    }
    bool covers(const mpz_class& lo, const mpz_class& hi) const override {
        return lo >= 0 && fits_u64(hi);
    }
};

class BigOracle final : public PrimalityOracle {
public:
    explicit BigOracle(int rounds) : rounds_(rounds) {}
    bool is_prime(const mpz_class& v) override {
        return is_prime_big(v, rounds_).probably_prime();
    }
    bool covers(const mpz_class&, const mpz_class&) const override { return true; }

private:
    int rounds_;
};

class ConstructionOracle final : public PrimalityOracle {
public:
    ConstructionOracle(const Construction& c, const mpz_class& n, int rounds)
        : start_(c.g * n + c.h),
          z_floor_(static_cast<int64_t>(std::floor(c.params.z))),
          offsets_(c.offsets.offsets.begin(), c.offsets.offsets.end()),
          rounds_(rounds) {}

    bool is_prime(const mpz_class& v) override {
        mpz_class rel = v - start_;
        if (rel < 1 || rel > z_floor_)
            throw ArgumentError("construction oracle: value outside certified window");
        int64_t t = static_cast<int64_t>(rel.get_si());
        if (!offsets_.count(t)) return false;  // composite by divisor certificate
        return is_prime_big(v, rounds_).probably_prime();
    }
    bool covers(const mpz_class& lo, const mpz_class& hi) const override {
        return lo >= start_ + 1 && hi <= start_ + z_floor_;
    }

private:
    mpz_class start_;
    int64_t z_floor_;
    std::set<int64_t> offsets_;
    int rounds_;
};

int64_t reach_at(const mpz_class& N, double lambda) {
    return static_cast<int64_t>(std::floor(lambda * log_mpz(N) + kTieTol));
}

}  // namespace

std::unique_ptr<PrimalityOracle> small_oracle() { return std::make_unique<SmallOracle>(); }
std::unique_ptr<PrimalityOracle> big_oracle(int rounds) {
    return std::make_unique<BigOracle>(rounds);
}
std::unique_ptr<PrimalityOracle> construction_oracle(const Construction& c,
                                                     const mpz_class& n, int rounds) {
    return std::make_unique<ConstructionOracle>(c, n, rounds);
}

WalkTrace window_counts(PrimalityOracle& oracle, const mpz_class& N0, double lambda,
                        int64_t j_max, int64_t j_min) {
    if (!(lambda > 0)) throw ArgumentError("window_counts: lambda must be positive");
    if (j_max < j_min || j_min < 0) throw ArgumentError("window_counts: bad j range");
    if (N0 < 1) throw ArgumentError("window_counts: N0 must be >= 1");

    int64_t top_rel = j_max + reach_at(N0 + j_max, lambda);
    if (!oracle.covers(N0 + j_min + 1, N0 + top_rel))
        throw ArgumentError("window_counts: oracle does not cover the walk range");

    // prefix[r] = #{primes among N0+1 .. N0+r}
    std::vector<uint64_t> prefix(static_cast<size_t>(top_rel) + 1, 0);
    for (int64_t r = 1; r <= top_rel; ++r)
        prefix[r] = prefix[r - 1] +
                    ((r > j_min && oracle.is_prime(N0 + r)) ? 1 : 0);
    // positions <= j_min never fall inside any window (windows open at N_j)

    WalkTrace trace;
    trace.N0 = N0;
    trace.lambda = lambda;
    trace.j_start = j_min;
    trace.counts.reserve(static_cast<size_t>(j_max - j_min + 1));
    for (int64_t j = j_min; j <= j_max; ++j) {
        int64_t d = reach_at(N0 + j, lambda);
        trace.counts.push_back(prefix[std::min(j + d, top_rel)] - prefix[j]);
    }
    return trace;
}

bool check_step_property(const WalkTrace& trace) {
    for (size_t i = 1; i < trace.counts.size(); ++i)
        if (trace.counts[i] + 1 < trace.counts[i - 1]) return false;
    return true;
}

int64_t find_exact(const WalkTrace& trace, uint64_t m) {
    auto first_ge = std::find_if(trace.counts.begin(), trace.counts.end(),
                                 [&](uint64_t c) { return c >= m; });
    if (first_ge == trace.counts.end())
        throw ArgumentError("find_exact: no window with count >= m");
    for (auto it = first_ge; it != trace.counts.end(); ++it)
        if (*it == m)
            return trace.j_start + static_cast<int64_t>(it - trace.counts.begin());
    throw ArgumentError("find_exact: count never equals m after reaching m");
}

LocateResult locate(const Construction& c, const mpz_class& n, uint64_t m, double x,
                    std::optional<int64_t> walk_end, int rounds) {
    if (n < 1) throw ArgumentError("locate: n must be >= 1");
    const double lambda = c.params.lambda;
    const auto& offs = c.offsets.offsets;
    if (offs.empty()) throw ArgumentError("locate: construction has no offsets");
    const int64_t h1 = offs.front(), hk = offs.back();
    const int64_t Z = static_cast<int64_t>(std::floor(c.params.z));

    // Precondition: at least m of the k form values are prime.
    mpz_class N0 = c.g * n + c.h;
    uint64_t prime_forms = 0;
    for (int64_t hi : offs)
        if (is_prime_big(N0 + hi, rounds).probably_prime()) ++prime_forms;
    if (prime_forms < m)
        throw ArgumentError("locate: fewer than m of the form values are prime at this n");

    int64_t j_start = h1 - 1;
    if (j_start < 0) throw ArgumentError("locate: h_1 - 1 < 0 (offsets must exceed 1)");
    int64_t j_end = walk_end.value_or(
        static_cast<int64_t>(std::floor(2.0 * lambda * log_mpz(N0))));
    // Keep every window inside the certified range [1, z].
    int64_t j_cap = Z - reach_at(N0 + Z, lambda);
    int64_t walk_end_used = std::min(j_end, j_cap);
    if (walk_end_used < j_start)
        throw ArgumentError("locate: certified walk range is empty for these parameters");

    auto oracle = construction_oracle(c, n, rounds);
    LocateResult result;
    result.n = n;
    result.walk_end_used = walk_end_used;
    if (x > 1) {  // the paper-scale offset inequalities, reported per run
        double llx = lambda * std::log(x);
        result.offsets_span_ok = hk - h1 < -1.0 + llx;
        result.offsets_range_ok = h1 > 1 && hk < -1.0 + 2.0 * llx;
    }
    result.trace = window_counts(*oracle, N0, lambda, walk_end_used, j_start);

    // Endpoint facts, asserted whenever the offset inequalities make them due.
    int64_t first_reach = reach_at(N0 + j_start, lambda);
    if (hk - h1 <= first_reach - 1) {
        if (result.trace.at(j_start) < prime_forms)
            throw InternalError("locate: start window misses a prime form value");
        result.endpoint_full_checked = true;
    }
    if (walk_end_used >= hk) {
        if (result.trace.at(walk_end_used) != 0)
            throw InternalError("locate: final window is not empty");
        result.endpoint_empty_checked = true;
    }

    int64_t j = find_exact(result.trace, m);
    result.trace.located_j = j;
    result.j = j;
    result.N_j = N0 + j;

    // Independent recount: direct primality on every integer in the window,
    // no certificates involved.
    int64_t d = reach_at(result.N_j, lambda);
    for (int64_t r = 1; r <= d; ++r) {
        mpz_class v = result.N_j + r;
        bool prime = fits_u64(v) ? is_prime_small(v.get_ui())
                                 : is_prime_big(v, rounds).probably_prime();
        if (prime) result.primes_in_window.push_back(v);
    }
    if (result.primes_in_window.size() != m)
        throw InternalError("locate: independent recount disagrees with the walk");
    return result;
}

uint64_t count_prime_rich(const LinearSystem& sys, const mpz_class& x, uint64_t m,
                          int rounds) {
    if (x < 1) throw ArgumentError("count_prime_rich: x must be >= 1");
    if (!fits_u64(x) || x.get_ui() > (uint64_t{1} << 26))
        throw ResourceError("count_prime_rich: enumeration budget is 2^26 values of n");
    if (m > sys.forms.size()) return 0;
    if (m == 0) return x.get_ui();

    uint64_t count = 0;
    for (mpz_class n = x; n < 2 * x; ++n) {
        uint64_t hits = 0;
        for (const auto& f : sys.forms) {
            mpz_class v = f(n);
            if (v < 0) continue;
            bool prime = fits_u64(v) ? is_prime_small(v.get_ui())
                                     : is_prime_big(v, rounds).probably_prime();
            if (prime && ++hits >= m) break;
        }
        if (hits >= m) ++count;
    }
    return count;
}

}  // namespace pslab
