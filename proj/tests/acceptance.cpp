// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Criteria 3 and 4 are empirical checks of asymptotic conjectures; at this
// scale the measured values sit outside the stated tolerances, and the suite
// flags them as failures rather than passing silently (see README).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pslab/cli.hpp"
#include "pslab/construction.hpp"
#include "pslab/cramer.hpp"
#include "pslab/discrepancy.hpp"
#include "pslab/emit.hpp"
#include "pslab/primality.hpp"
#include "pslab/rng.hpp"
#include "pslab/sieve.hpp"
#include "pslab/stats.hpp"
#include "pslab/walk.hpp"

using namespace pslab;

namespace {

struct Harness {
    int failed = 0;

    void report(int id, const std::string& name, bool ok, const std::string& detail) {
        std::printf("criterion %2d [%-24s] %s  %s\n", id, name.c_str(),
                    ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

}  // namespace

int main() {
    Harness h;
    SieveConfig cfg;
    cfg.threads = 2;

    // 1. Sieve exactness: pi(10^8), pi(10^9) against the byte-sieve oracle
    // and a deterministic-primality spot check. Zero tolerance, < 30 s.
    {
        auto t0 = std::chrono::steady_clock::now();
        uint64_t pi8 = count_primes(0, 100000000ull, cfg);
        uint64_t pi9 = count_primes(0, 1000000000ull, cfg);

        rng::Stream spot_rng(1);
        uint64_t spot_checked = 0, spot_bad = 0;
        auto probe = [&](uint64_t start, uint64_t stop, const std::vector<uint8_t>& flags) {
            for (int i = 0; i < 8; ++i) {  // deterministic primality vs byte sieve
                uint64_t n = start + spot_rng.next_below(stop - start + 1);
                ++spot_checked;
                if (is_prime_small(n) != static_cast<bool>(flags[n - start])) ++spot_bad;
            }
        };
        uint64_t oracle8 = oracle::count_primes_bytes(0, 100000000ull, probe);
        uint64_t oracle9 = oracle::count_primes_bytes(0, 1000000000ull, probe);
        double secs = seconds_since(t0);
        bool ok = pi8 == 5761455 && pi9 == 50847534 && oracle8 == 5761455 &&
                  oracle9 == 50847534 && spot_bad == 0 && secs < 30.0;
        h.report(1, "sieve-exactness", ok,
                 "pi(1e8)=" + std::to_string(pi8) + " pi(1e9)=" + std::to_string(pi9) +
                     " oracle=" + std::to_string(oracle8) + "/" + std::to_string(oracle9) +
                     " mr_spot=" + std::to_string(spot_checked) + "(" +
                     std::to_string(spot_bad) + " bad) in " + fmt(secs, 3) + "s");
    }

    // 2 + 3 share one histogram pass over n <= 10^8.
    WindowHistogram hist8;
    {
        auto t0 = std::chrono::steady_clock::now();
        hist8 = window_histogram(100000000ull, 1.0, cfg);
        double secs = seconds_since(t0);

        double mean = hist8.mean();
        bool ok2 = mean >= 0.95 && mean <= 1.05 && secs < 60.0;
        h.report(2, "pnt-on-average", ok2,
                 "mean=" + fmt(mean, 8) + " target [0.95, 1.05] in " + fmt(secs, 3) + "s");

        double tv = tv_distance(hist8, 1.0);
        double chi = poisson_chi_square(hist8, 1.0, 8);
        bool ok3 = tv <= 0.05;
        h.report(3, "poisson-window-tv", ok3,
                 "tv=" + fmt(tv, 6) + " tolerance 0.05, chi2(m<=8)=" + fmt(chi, 6) +
                     (ok3 ? "" : "  [FLAGGED: conjectural limit not reached at x=1e8]"));
    }

    // 4. Exponential gaps: mass of d_n/log n in (0,1] at x = 10^8.
    {
        auto gh = gap_histogram(100000000ull, {0.0, 1.0}, false, cfg);
        double mass = static_cast<double>(gh.bin_counts[0]) / gh.n_total;
        double target = 1.0 - std::exp(-1.0);
        auto gh_p = gap_histogram(100000000ull, {0.0, 1.0}, true, cfg);
        double mass_p = static_cast<double>(gh_p.bin_counts[0]) / gh_p.n_total;
        bool ok = std::abs(mass - target) <= 0.05;
        h.report(4, "exponential-gaps", ok,
                 "mass=" + fmt(mass, 6) + " vs 1-1/e=" + fmt(target, 6) + " (|diff|=" +
                     fmt(std::abs(mass - target), 4) + ", tolerance 0.05; log p_n mode gives " +
                     fmt(mass_p, 6) + ")" +
                     (ok ? "" : "  [FLAGGED: index-normalized mass converges only as x grows]"));
    }

    // 5. Cramer model: TV to Poisson(2) <= 0.02 at seed 42, bit-identical
    // rerun from the manifest.
    {
        auto run = simulate(1000000, 2.0, 42);
        double tv = tv_distance(run.histogram, 2.0);
        auto rerun = simulate(1000000, 2.0, 42);
        bool bit_identical = run.histogram.counts == rerun.histogram.counts;

        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "pslab_acceptance";
        fs::create_directories(dir);
        std::string out = (dir / "cramer.json").string();
        bool replay_ok = false;
        if (cli::run({"cramer", "--x", "1000000", "--lambda", "2", "--seed", "42", "--out",
                      out}) == 0) {
            std::string first = read_file(out);
            fs::remove(out);
            if (cli::run({"replay", "--manifest", out + ".manifest.json"}) == 0)
                replay_ok = read_file(out) == first;
        }
        fs::remove_all(dir);
        bool ok = tv <= 0.02 && bit_identical && replay_ok;
        h.report(5, "cramer-model", ok,
                 "tv=" + fmt(tv, 6) + " tolerance 0.02, rerun bit-identical=" +
                     (bit_identical ? "yes" : "no") + ", manifest replay byte-identical=" +
                     (replay_ok ? "yes" : "no"));
    }

    // 6. Admissibility oracle equivalence: 1000 random tuples, zero
    // mismatches, < 1 s.
    {
        auto t0 = std::chrono::steady_clock::now();
        rng::Stream s(314159);
        int mismatches = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            size_t k = 1 + s.next_below(6);
            std::set<int64_t> hs;
            while (hs.size() < k) hs.insert(static_cast<int64_t>(s.next_below(31)));
            std::vector<int64_t> v(hs.begin(), hs.end());
            if (is_admissible_offsets(OffsetTuple{v}) != oracle::admissible_offsets_naive(v))
                ++mismatches;
        }
        double secs = seconds_since(t0);
        bool ok = mismatches == 0 && secs < 1.0;
        h.report(6, "admissibility-oracle", ok,
                 "1000 tuples, " + std::to_string(mismatches) + " mismatches in " +
                     fmt(secs, 3) + "s");
    }

    // 7. Construction soundness, pinned seeds, < 1 s.
    {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        std::string note;
        try {
            auto c = make_construction(override_params(3, 29, 60, 1), {}, 1);
            ok = ok && verify_survivors(c.residues, 60, c.offsets);
            ok = ok && is_admissible_offsets(c.offsets);
            for (auto [p, a] : c.residues.classes)
                ok = ok && mpz_class(c.h % p) == (p - a) % p;
            for (int64_t hi : c.offsets.offsets)
                ok = ok && gcd(c.g, mpz_class(c.h + hi)) == 1;
            auto worked = sieve_residues(7, 10, 1, 2, {}, 7);
            ok = ok && worked.survivors == std::vector<int64_t>{1, 7};
            note = "offsets {";
            for (size_t i = 0; i < c.offsets.offsets.size(); ++i)
                note += (i ? "," : "") + std::to_string(c.offsets.offsets[i]);
            note += "}, worked example survivors {1,7} reproduced";
        } catch (const std::exception& e) {
            ok = false;
            note = std::string("exception: ") + e.what();
        }
        double secs = seconds_since(t0);
        ok = ok && secs < 1.0;
        h.report(7, "construction-soundness", ok, note + " in " + fmt(secs, 3) + "s");
    }

    // 8. Window identity: 100 random n <= 10^6, every non-offset position
    // carries an exact divisor certificate.
    {
        bool ok = true;
        std::string note;
        try {
            auto c = make_construction(override_params(3, 29, 60, 1), {}, 1);
            rng::Stream s(606);
            std::vector<mpz_class> ns;
            for (int i = 0; i < 100; ++i)
                ns.emplace_back(static_cast<unsigned long>(1 + s.next_below(1000000)));
            auto rep = verify_window_identity(c, ns);
            uint64_t cert_count = 0;
            for (const auto& rec : rep.samples) cert_count += rec.certificates.size();
            ok = rep.all_ok && cert_count == 100 * (60 - 3);
            note = "100 samples, " + std::to_string(cert_count) +
                   " positions certified, all divisor checks exact";
        } catch (const std::exception& e) {
            ok = false;
            note = std::string("exception: ") + e.what();
        }
        h.report(8, "window-identity", ok, note);
    }

    // 9. Interval walk: 100 locates across m in {0,1,2}, step property plus
    // independent recount, zero failures.
    {
        int runs = 0, failures = 0;
        int m_used[3] = {0, 0, 0};
        std::string err;
        try {
            auto c = make_construction(override_params(3, 29, 60, 1, 0.32), {41, 45, 47}, 7);
            unsigned long n = 1000;
            rng::Stream s(909);
            while (runs < 100 && n < 100000) {
                ++n;
                uint64_t prime_forms = 0;
                for (int64_t hi : c.offsets.offsets)
                    if (is_prime_big(c.g * static_cast<long>(n) + c.h + hi).probably_prime())
                        ++prime_forms;
                uint64_t m = runs % 2 == 0 ? std::min<uint64_t>(prime_forms, 2) : 0;
                if (runs % 2 == 0 && prime_forms == 0) continue;  // want m >= 1 on even slots
                auto res = locate(c, mpz_class(n), m, 1e6, 60);
                bool step = check_step_property(res.trace);
                bool recount = res.primes_in_window.size() == m;
                if (!step || !recount) ++failures;
                ++m_used[m];
                ++runs;
            }
        } catch (const std::exception& e) {
            err = std::string(" exception: ") + e.what();
            ++failures;
        }
        bool ok = failures == 0 && runs == 100;
        h.report(9, "interval-walk", ok,
                 std::to_string(runs) + " locates (m=0:" + std::to_string(m_used[0]) +
                     " m=1:" + std::to_string(m_used[1]) + " m=2:" + std::to_string(m_used[2]) +
                     "), " + std::to_string(failures) + " failures" + err);
    }

    // 10. Discrepancy oracle equivalence: L = n+1, x = 10^4, all q <= 50,
    // exact match against the naive double loop; < 10 s.
    {
        auto t0 = std::chrono::steady_clock::now();
        LinearForm f{1, 1};
        // one trial-division pass feeds the naive side
        std::vector<uint8_t> prime_flag(20002, 0);
        for (uint64_t v = 2; v <= 20001; ++v)
            prime_flag[v] = oracle::trial_division_is_prime(v);
        auto is_prime_tab = [&](uint64_t v) { return v < prime_flag.size() && prime_flag[v]; };

        int mismatches = 0;
        for (uint64_t q = 1; q <= 50; ++q) {
            auto fast = max_delta(f, 10000, q, cfg);
            auto naive = oracle::max_delta_naive(1, 1, 10000, q, is_prime_tab);
            if (!fast.a_star) { ++mismatches; continue; }
            if (fast.max_abs_delta != naive.second) ++mismatches;
            if (std::abs(delta(f, 10000, q, *fast.a_star, cfg)) != naive.second) ++mismatches;
        }
        bool zeros_ok = delta(f, 10, 2, 0) == 0.0 && delta(f, 10, 1, 0) == 0.0 &&
                        delta(f, 10, 3, 0) == 0.0;
        double secs = seconds_since(t0);
        bool ok = mismatches == 0 && zeros_ok && secs < 10.0;
        h.report(10, "discrepancy-oracle", ok,
                 "q<=50 exact match, " + std::to_string(mismatches) +
                     " mismatches, hand zeros " + (zeros_ok ? "ok" : "BAD") + " in " +
                     fmt(secs, 3) + "s");
    }

    // 11. Density lower bound at desk scale.
    {
        auto rep = lower_bound_check(LinearForm{1, 1}, 10000, 1, cfg);
        bool ok = rep.holds && rep.main_count == 1033 && std::abs(rep.right - 542.868) < 0.01;
        h.report(11, "lower-bound-check", ok,
                 "left=" + fmt(rep.left, 6) + " right=" + fmt(rep.right, 6) + " holds=" +
                     (rep.holds ? "yes" : "no"));
    }

    std::printf("%s: %d criterion(s) failed\n", h.failed ? "RESULT FAIL" : "RESULT PASS",
                h.failed);
    return h.failed ? 1 : 0;
}
