#include "pslab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pslab/errors.hpp"

namespace pslab {

namespace {

void require_positive_lambda(double lambda) {
    if (!(lambda > 0)) throw ArgumentError("lambda must be positive");
}

uint64_t window_reach(uint64_t n, double lambda) {
    return static_cast<uint64_t>(std::floor(lambda * std::log(static_cast<double>(n)) + kTieTol));
}

// Histogram of window counts for n in [n_lo, n_hi], two pointers into the
// ascending prime list.
void histogram_chunk(uint64_t n_lo, uint64_t n_hi, double lambda,
                     const std::vector<uint64_t>& primes, uint32_t m_max,
                     WindowHistogram& out) {
    size_t lo = std::upper_bound(primes.begin(), primes.end(), n_lo) - primes.begin();
    size_t hi = std::upper_bound(primes.begin(), primes.end(), n_lo + window_reach(n_lo, lambda)) -
                primes.begin();
    for (uint64_t n = n_lo; n <= n_hi; ++n) {
        while (lo < primes.size() && primes[lo] <= n) ++lo;
        uint64_t right = n + window_reach(n, lambda);
        while (hi < primes.size() && primes[hi] <= right) ++hi;
        if (hi < lo) hi = lo;  // cannot happen for sane input; keeps count unsigned-safe
        uint64_t m = hi - lo;
        out.prime_hits += m;
        uint32_t bucket = static_cast<uint32_t>(std::min<uint64_t>(m, m_max));
        if (m > m_max) ++out.overflow;
        ++out.counts[bucket];
        ++out.n_total;
    }
}

}  // namespace

uint64_t GapHistogram::out_of_range() const {
    uint64_t binned = 0;
    for (uint64_t c : bin_counts) binned += c;
    return n_total - binned;
}

uint64_t window_count(uint64_t n, double lambda, const SieveConfig& cfg) {
    require_positive_lambda(lambda);
    if (n < 1) throw ArgumentError("window_count: n must be >= 1");
    return count_primes(n, n + window_reach(n, lambda), cfg);
}

WindowHistogram window_histogram(uint64_t x, double lambda, const SieveConfig& cfg,
                                 uint32_t m_max) {
    require_positive_lambda(lambda);
    if (x < 2) throw ArgumentError("window_histogram: x must be >= 2");

    uint64_t upper = x + window_reach(x, lambda) + 1;
    std::vector<uint64_t> primes;
    primes.reserve(static_cast<size_t>(1.1 * upper / std::max(1.0, std::log(upper))) + 64);
    primes_in(0, upper, [&](uint64_t p) { primes.push_back(p); }, cfg);

    WindowHistogram result;
    result.x = x;
    result.lambda = lambda;
    result.m_max = m_max;

    int threads = std::max(1, cfg.threads);
    if (threads == 1 || x < 1u << 16) {
        histogram_chunk(1, x, lambda, primes, m_max, result);
        return result;
    }
    std::vector<WindowHistogram> parts(threads);
    std::vector<std::thread> pool;
    uint64_t chunk = (x + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            uint64_t lo = 1 + chunk * t;
            uint64_t hi = std::min(x, lo + chunk - 1);
            if (lo <= hi) histogram_chunk(lo, hi, lambda, primes, m_max, parts[t]);
        });
    for (auto& th : pool) th.join();
    for (const auto& part : parts) {
        result.prime_hits += part.prime_hits;
        result.overflow += part.overflow;
        result.n_total += part.n_total;
        for (auto [m, c] : part.counts) result.counts[m] += c;
    }
    return result;
}

double poisson_pmf(double lambda, uint32_t m) {
    require_positive_lambda(lambda);
    if (m > 20)
        return std::exp(m * std::log(lambda) - lambda - std::lgamma(m + 1.0));
    double v = std::exp(-lambda);
    for (uint32_t i = 1; i <= m; ++i) v *= lambda / i;
    return v;
}

double tv_distance(const WindowHistogram& hist, double lambda) {
    require_positive_lambda(lambda);
    if (hist.n_total == 0) throw ArgumentError("tv_distance: empty histogram");
    uint32_t m_top = hist.counts.empty() ? 0 : hist.counts.rbegin()->first;
    double total = 0, pmf_seen = 0;
    for (uint32_t m = 0; m <= m_top; ++m) {
        auto it = hist.counts.find(m);
        double freq = it == hist.counts.end()
                          ? 0.0
                          : static_cast<double>(it->second) / hist.n_total;
        double pmf = poisson_pmf(lambda, m);
        pmf_seen += pmf;
        total += std::abs(freq - pmf);
    }
    total += std::max(0.0, 1.0 - pmf_seen);  // pmf mass above m_top
    return total / 2;
}

double mean_window_count(uint64_t x, double lambda, const SieveConfig& cfg) {
    return window_histogram(x, lambda, cfg).mean();
}

GapHistogram gap_histogram(uint64_t x, const std::vector<double>& bin_edges,
                           bool normalize_by_log_p, const SieveConfig& cfg) {
    if (x < 3) throw ArgumentError("gap_histogram: x must be >= 3");
    if (bin_edges.size() < 2) throw ArgumentError("gap_histogram: need at least two bin edges");
    for (size_t i = 1; i < bin_edges.size(); ++i)
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw ArgumentError("gap_histogram: bin edges must be strictly ascending");

    std::vector<uint64_t> primes;
    primes_in(0, x, [&](uint64_t p) { primes.push_back(p); }, cfg);

    GapHistogram gh;
    gh.bin_edges = bin_edges;
    gh.bin_counts.assign(bin_edges.size() - 1, 0);
    uint64_t pi_x = primes.size();
    for (uint64_t n = 2; n + 1 <= pi_x; ++n) {  // 2 <= n <= pi(x) - 1
        double d = static_cast<double>(primes[n] - primes[n - 1]);  // p_{n+1} - p_n
        double norm = normalize_by_log_p ? std::log(static_cast<double>(primes[n - 1]))
                                         : std::log(static_cast<double>(n));
        double val = d / norm;
        ++gh.n_total;
        // value in (edge_i, edge_{i+1}]
        auto it = std::lower_bound(bin_edges.begin(), bin_edges.end(), val);
        if (it == bin_edges.begin() || it == bin_edges.end()) continue;  // out of range
        gh.bin_counts[(it - bin_edges.begin()) - 1]++;
    }
    return gh;
}

double exponential_mass(double a, double b) {
    if (a < 0) throw ArgumentError("exponential_mass: a must be >= 0");
    if (b < a) throw ArgumentError("exponential_mass: b must be >= a");
    return std::exp(-a) - (std::isinf(b) ? 0.0 : std::exp(-b));
}

double poisson_chi_square(const WindowHistogram& hist, double lambda, uint32_t m_hi) {
    require_positive_lambda(lambda);
    double chi = 0;
    for (uint32_t m = 0; m <= m_hi; ++m) {
        auto it = hist.counts.find(m);
        double obs = it == hist.counts.end() ? 0.0 : static_cast<double>(it->second);
        double expd = static_cast<double>(hist.n_total) * poisson_pmf(lambda, m);
        if (expd > 0) chi += (obs - expd) * (obs - expd) / expd;
    }
    return chi;
}

}  // namespace pslab
