#include "pslab/cramer.hpp"

#include <cmath>
#include <thread>

#include "pslab/errors.hpp"
#include "pslab/kernels.hpp"
#include "pslab/rng.hpp"

namespace pslab {

namespace {

uint64_t threshold_for(double p) {
    // P(u64 < t) = t / 2^64; p < 1/2 so the product stays well inside range.
    return static_cast<uint64_t>(p * 0x1.0p64);
}

bool bit_at(const std::vector<uint64_t>& w, uint64_t i) { return (w[i >> 6] >> (i & 63)) & 1; }

}  // namespace

ModelRun simulate(uint64_t x, double lambda, uint64_t seed, bool per_n, int threads) {
    if (!(lambda > 0)) throw ArgumentError("simulate: lambda must be positive");
    if (x < 8) throw ArgumentError("simulate: x must be >= 8 (model degenerate below)");

    ModelRun run;
    run.x = x;
    run.lambda = lambda;
    run.seed = seed;
    run.per_n_probability = per_n;
    double log_x = std::log(static_cast<double>(x));
    run.p = 1.0 / log_x;
    run.window_len = static_cast<uint64_t>(std::floor(lambda * log_x));
    run.histogram.x = x;
    run.histogram.lambda = lambda;

    const uint64_t w = run.window_len;
    const uint64_t H = x + static_cast<uint64_t>(std::ceil(lambda * log_x));  // X_1..X_H

    std::vector<uint64_t> words(kernels::words_for_bits(H), 0);
    if (per_n) {
        // Exploration mode: per-index probability min(1, 1/log i).
        for (uint64_t i = 2; i <= H; ++i) {
            double pi_i = 1.0 / std::log(static_cast<double>(i));
            bool one = pi_i >= 1.0 || rng::at(seed, i - 1) < threshold_for(pi_i);
            if (one) words[(i - 1) >> 6] |= uint64_t{1} << ((i - 1) & 63);
        }
    } else {
        uint64_t t = threshold_for(run.p);
        int nthreads = std::max(1, threads);
        if (nthreads == 1 || H < (uint64_t{1} << 18)) {
            kernels::bernoulli_fill(words.data(), H, seed, 0, t);
        } else {
            // Chunks split on word boundaries; absolute counters keep the
            // stream identical to the sequential fill.
            uint64_t words_per = (words.size() + nthreads - 1) / nthreads;
            std::vector<std::thread> pool;
            for (int k = 0; k < nthreads; ++k)
                pool.emplace_back([&, k] {
                    uint64_t w0 = words_per * k;
                    if (w0 >= words.size()) return;
                    uint64_t w1 = std::min<uint64_t>(words.size(), w0 + words_per);
                    uint64_t nbits = std::min(H - w0 * 64, (w1 - w0) * 64);
                    kernels::bernoulli_fill(words.data() + w0, nbits, seed, w0 * 64, t);
                });
            for (auto& th : pool) th.join();
        }
    }

    // Rolling window sum: for n, count X_{n+1}..X_{n+w} (bit index n..n+w-1).
    uint64_t sum = w ? kernels::popcount_range(words.data(), 1, 1 + w) : 0;
    // n = 1 window is X_2..X_{1+w}
    auto& hist = run.histogram;
    for (uint64_t n = 1; n <= x; ++n) {
        hist.prime_hits += sum;
        ++hist.counts[static_cast<uint32_t>(std::min<uint64_t>(sum, hist.m_max))];
        if (sum > hist.m_max) ++hist.overflow;
        ++hist.n_total;
        if (n == x) break;
        if (w) {
            sum -= bit_at(words, n);          // drop X_{n+1}
            sum += bit_at(words, n + w);      // add X_{n+1+w}
        }
    }
    return run;
}

double two_sample_chi_square(const WindowHistogram& a, const WindowHistogram& b) {
    uint32_t top = 0;
    if (!a.counts.empty()) top = std::max(top, a.counts.rbegin()->first);
    if (!b.counts.empty()) top = std::max(top, b.counts.rbegin()->first);
    double chi = 0;
    for (uint32_t m = 0; m <= top; ++m) {
        auto ia = a.counts.find(m);
        auto ib = b.counts.find(m);
        double ca = ia == a.counts.end() ? 0.0 : static_cast<double>(ia->second);
        double cb = ib == b.counts.end() ? 0.0 : static_cast<double>(ib->second);
        if (ca + cb > 0) chi += (ca - cb) * (ca - cb) / (ca + cb);
    }
    return chi;
}

ModelComparison compare_model_vs_primes(uint64_t x, double lambda, uint64_t seed,
                                        const SieveConfig& cfg) {
    ModelComparison cmp;
    cmp.model = simulate(x, lambda, seed, false, cfg.threads);
    cmp.primes = window_histogram(x, lambda, cfg);
    cmp.model_tv = tv_distance(cmp.model.histogram, lambda);
    cmp.primes_tv = tv_distance(cmp.primes, lambda);
    cmp.chi_square = two_sample_chi_square(cmp.model.histogram, cmp.primes);
    return cmp;
}

}  // namespace pslab
