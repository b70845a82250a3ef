#pragma once

#include <cstdint>

#include "pslab/stats.hpp"

namespace pslab {

// One Monte Carlo run of the Bernoulli prime model: X_1..X_H independent,
// X_i = 1 with probability 1/log x, windows of fixed length floor(lambda*log x).
struct ModelRun {
    uint64_t x = 0;
    double lambda = 0;
    uint64_t seed = 0;
    double p = 0;                 // success probability 1/log x
    uint64_t window_len = 0;      // floor(lambda * log x)
    bool per_n_probability = false;
    WindowHistogram histogram;
};

// Deterministic given (x, lambda, seed): the indicator stream comes from the
// counter generator in rng.hpp, so chunked parallel evaluation is bit-identical
// to a sequential run. With per_n set, X_i flips with probability 1/log i
// instead of 1/log x (exploration mode; scalar path).
ModelRun simulate(uint64_t x, double lambda, uint64_t seed,
                  bool per_n = false, int threads = 1);

struct ModelComparison {
    ModelRun model;
    WindowHistogram primes;
    double model_tv = 0;   // vs Poisson(lambda)
    double primes_tv = 0;  // vs Poisson(lambda)
    double chi_square = 0; // two-sample statistic between the histograms
};

ModelComparison compare_model_vs_primes(uint64_t x, double lambda, uint64_t seed,
                                        const SieveConfig& cfg = {});

// sum over bins of (a_m - b_m)^2 / (a_m + b_m); zero iff identical.
double two_sample_chi_square(const WindowHistogram& a, const WindowHistogram& b);

}  // namespace pslab
