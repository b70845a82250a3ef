#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pslab/sieve.hpp"

namespace pslab {

// Tie tolerance for the real right endpoint n + lambda*log(n): a prime p
// qualifies iff p - n <= lambda*log(n) + kTieTol. Recorded in run metadata.
inline constexpr double kTieTol = 1e-9;

// Counts of n by m = pi(n + lambda*log n) - pi(n), n = 1..x.
struct WindowHistogram {
    uint64_t x = 0;
    double lambda = 0;
    std::map<uint32_t, uint64_t> counts;  // m -> #{n}
    uint64_t n_total = 0;
    uint64_t overflow = 0;      // n whose m exceeded m_max, clamped into counts[m_max]
    uint32_t m_max = 64;
    uint64_t prime_hits = 0;    // sum over n of the window count (exact)

    double mean() const { return n_total ? static_cast<double>(prime_hits) / n_total : 0.0; }
};

struct GapHistogram {
    std::vector<double> bin_edges;    // strictly ascending
    std::vector<uint64_t> bin_counts; // bin i <-> (edge_i, edge_{i+1}]
    uint64_t n_total = 0;

    uint64_t out_of_range() const;
};

uint64_t window_count(uint64_t n, double lambda, const SieveConfig& cfg = {});

// Single two-pointer pass over a sieved [1, x + lambda*log x]; windows are
// never recounted from scratch. Chunks may run in parallel (cfg.threads) and
// merge by pointwise addition.
WindowHistogram window_histogram(uint64_t x, double lambda, const SieveConfig& cfg = {},
                                 uint32_t m_max = 64);

// lambda^m e^-lambda / m!, in log space for m > 20.
double poisson_pmf(double lambda, uint32_t m);

// Half L1 distance between the histogram law and Poisson(lambda); the pmf
// tail beyond the largest observed m folds into one final term.
double tv_distance(const WindowHistogram& hist, double lambda);

double mean_window_count(uint64_t x, double lambda, const SieveConfig& cfg = {});

// Bins d_n / log n (n the prime index, p_{n+1} <= x) for 2 <= n <= pi(x)-1.
// With normalize_by_log_p set, divides by log p_n instead (comparison mode).
GapHistogram gap_histogram(uint64_t x, const std::vector<double>& bin_edges,
                           bool normalize_by_log_p = false, const SieveConfig& cfg = {});

// exp(-a) - exp(-b); pass b = infinity for the full tail.
double exponential_mass(double a, double b);

// Pearson statistic sum (obs_m - x*pmf_m)^2 / (x*pmf_m) over m = 0..m_hi.
double poisson_chi_square(const WindowHistogram& hist, double lambda, uint32_t m_hi);

}  // namespace pslab
