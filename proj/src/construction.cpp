#include "pslab/construction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include <nlohmann/json.hpp>

#include "pslab/bigutil.hpp"
#include "pslab/errors.hpp"
#include "pslab/primality.hpp"
#include "pslab/rng.hpp"
#include "pslab/sieve.hpp"

namespace pslab {

namespace {

std::vector<double> betas_for(int k, double lambda) {
    std::vector<double> b(k);
    for (int i = 1; i <= k; ++i) b[i - 1] = std::ldexp(lambda, i - k);
    return b;
}

std::vector<uint64_t> residue_domain(double y, uint64_t B) {
    std::vector<uint64_t> dom;
    primes_in(0, static_cast<uint64_t>(std::floor(y)), [&](uint64_t p) {
        if (B % p != 0) dom.push_back(p);
    });
    return dom;
}

}  // namespace

int choose_k(double lambda, int m, double C) {
    (void)lambda;
    if (!(C > 0)) throw ArgumentError("choose_k: C must be positive");
    if (m < 0) throw ArgumentError("choose_k: m must be >= 0");
    double bound = std::max({C, std::exp(2.0), std::exp(2.0 * C * m)});
    if (bound > 1e9) throw ArgumentError("choose_k: k would exceed 10^9");
    int k = static_cast<int>(std::ceil(bound));
    while (k < bound) ++k;  // guard against ceil landing below an integral bound
    return std::max(k, 1);
}

ParamCheck derive_params(double x, double lambda, int m, double C) {
    if (!(lambda > 0)) throw ArgumentError("derive_params: lambda must be positive");
    ParamCheck out;
    auto& P = out.params;
    P.lambda = lambda;
    P.m = m;
    P.C = C;
    P.k = choose_k(lambda, m, C);
    P.betas = betas_for(P.k, lambda);
    P.B = 1;

    double l1 = std::log(x);
    double l2 = std::log(l1);
    double l3 = std::log(l2);
    double l4 = std::log(l3);
    if (!(l4 > 0)) throw ArgumentError("derive_params: need log_4 x > 0");

    P.v = (1.0 / (3.0 * (1.0 + 3.0 * lambda))) * (l3 / l4);
    P.y = 3.0 * (1.0 + 3.0 * lambda) * l1 * (l4 / l3);
    P.z = (1.0 + 3.0 * lambda) * l1;

    if (!(P.v >= 1.0)) {
        out.violated = "v >= 1";
        return out;
    }
    double beta_k = P.betas.back();
    double lhs = 2.0 * P.y * (1.0 + (1.0 + beta_k) * P.v);
    double l2y = std::log(std::log(P.y));
    double l3y = std::log(l2y);
    double rhs = P.y * l2y / l3y;
    if (!(lhs <= 2.0 * P.z)) {
        out.violated = "2y(1 + (1 + beta_k)v) <= 2z";
        return out;
    }
    if (!(2.0 * P.z <= rhs)) {
        out.violated = "2z <= y log_2(y) / log_3(y)";
        return out;
    }
    out.ok = true;
    return out;
}

ConstructionParams override_params(int k, double y, double z, uint64_t B,
                                   double lambda, int m, double C) {
    if (k < 1) throw ArgumentError("override_params: k must be >= 1");
    if (!(y >= 2)) throw ArgumentError("override_params: y must be >= 2");
    if (!(z >= 1)) throw ArgumentError("override_params: z must be >= 1");
    if (B < 1) throw ArgumentError("override_params: B must be >= 1");
    ConstructionParams P;
    P.lambda = lambda;
    P.m = m;
    P.C = C;
    P.k = k;
    P.betas = betas_for(k, lambda);
    P.y = y;
    P.z = z;
    P.B = B;
    P.override_mode = true;
    return P;
}

SieveResidueResult sieve_residues(double y, double z, uint64_t B, int k,
                                  const std::vector<double>& targets, uint64_t seed,
                                  int max_restarts) {
    if (k < 1) throw ArgumentError("sieve_residues: k must be >= 1");
    int64_t Z = static_cast<int64_t>(std::floor(z));
    if (Z < k) throw ArgumentError("sieve_residues: floor(z) < k, no room for survivors");
    if (!targets.empty() && static_cast<int>(targets.size()) != k)
        throw ArgumentError("sieve_residues: need exactly k targets");
    auto domain = residue_domain(y, B);

    // Protected positions: the element of [1, Z] nearest each target
    // (ties toward the smaller), made distinct by nudging outward.
    std::vector<int64_t> protected_pos;
    if (!targets.empty()) {
        std::set<int64_t> taken;
        for (double t : targets) {
            int64_t best = std::clamp<int64_t>(std::llround(t), 1, Z);
            int64_t probe = 0;
            while (taken.count(best + probe) || best + probe < 1 || best + probe > Z) {
                probe = probe <= 0 ? -probe + 1 : -probe;
                if (std::llabs(probe) > Z)
                    throw ArgumentError("sieve_residues: targets cannot be made distinct in [1, z]");
            }
            taken.insert(best + probe);
        }
        protected_pos.assign(taken.begin(), taken.end());
    }

    SieveResidueResult best_partial;
    int64_t best_gap = Z + 1;

    for (int restart = 0; restart <= max_restarts; ++restart) {
        rng::Stream jitter(rng::substream(seed, static_cast<uint64_t>(restart)));
        std::vector<uint8_t> alive(static_cast<size_t>(Z) + 1, 1);  // index 1..Z
        alive[0] = 0;
        std::vector<uint8_t> prot(static_cast<size_t>(Z) + 1, 0);
        for (int64_t p : protected_pos) prot[static_cast<size_t>(p)] = 1;
        int64_t alive_count = Z;

        ResidueAssignment assign;
        bool dead_end = false;
        for (uint64_t p : domain) {
            int64_t excess = alive_count - k;
            // Count kills per residue class; classes touching a protected
            // element are ineligible.
            std::vector<int64_t> kills(p, 0);
            std::vector<uint8_t> blocked(p, 0);
            for (int64_t t = 1; t <= Z; ++t) {
                if (prot[t]) blocked[t % p] = 1;
                else if (alive[t]) ++kills[t % p];
            }
            int64_t cap = excess;  // never drop below k survivors
            int64_t best_kill = -1;
            std::vector<uint64_t> cand;
            for (uint64_t a = 0; a < p; ++a) {
                if (blocked[a] || kills[a] > cap) continue;
                if (kills[a] > best_kill) {
                    best_kill = kills[a];
                    cand.assign(1, a);
                } else if (kills[a] == best_kill) {
                    cand.push_back(a);
                }
            }
            if (cand.empty()) {
                // Every class either kills too many or hits a protected
                // element; take the eligible class with the fewest kills and
                // let the final size check trigger a restart.
                int64_t fewest = Z + 1;
                for (uint64_t a = 0; a < p; ++a)
                    if (!blocked[a] && kills[a] < fewest) { fewest = kills[a]; cand.assign(1, a); }
                if (cand.empty()) { dead_end = true; break; }  // all classes protected
            }
            uint64_t a_p = restart == 0 ? cand.front()
                                        : cand[jitter.next_below(cand.size())];
            assign.classes[p] = a_p;
            for (int64_t t = ((a_p == 0) ? static_cast<int64_t>(p) : static_cast<int64_t>(a_p));
                 t <= Z; t += static_cast<int64_t>(p)) {
                if (alive[t] && !prot[t]) { alive[t] = 0; --alive_count; }
            }
        }

        std::vector<int64_t> survivors;
        for (int64_t t = 1; t <= Z; ++t)
            if (alive[t]) survivors.push_back(t);

        if (!dead_end && static_cast<int>(survivors.size()) == k) {
            OffsetTuple tuple{survivors};
            if (is_admissible_offsets(tuple)) {
                SieveResidueResult res;
                res.residues = std::move(assign);
                res.survivors = std::move(survivors);
                res.seed = seed;
                res.restarts_used = restart;
                return res;
            }
        }
        int64_t gap = std::llabs(static_cast<int64_t>(survivors.size()) - k);
        if (gap < best_gap) {
            best_gap = gap;
            best_partial.residues = assign;
            best_partial.survivors = survivors;
            best_partial.seed = seed;
            best_partial.restarts_used = restart;
        }
    }

    std::string partial = "survivors {";
    for (size_t i = 0; i < best_partial.survivors.size(); ++i)
        partial += (i ? "," : "") + std::to_string(best_partial.survivors[i]);
    partial += "}";
    throw ConstructionError(
        "sieve_residues: no admissible size-" + std::to_string(k) +
            " survivor set found within the retry budget (best had " +
            std::to_string(best_partial.survivors.size()) + " survivors)",
        partial);
}

std::pair<mpz_class, mpz_class> crt_combine(const ResidueAssignment& residues) {
    mpz_class g = 1, h = 0;
    for (auto [p, a] : residues.classes) {
        mpz_class pz(static_cast<unsigned long>(p));
        // want h' == h (mod g) and h' == -a (mod p)
        mpz_class target = (pz - static_cast<unsigned long>(a % p)) % pz;
        mpz_class ginv;
        mpz_class gp = g % pz;
        if (mpz_invert(ginv.get_mpz_t(), gp.get_mpz_t(), pz.get_mpz_t()) == 0)
            throw InternalError("crt_combine: moduli not coprime");
        mpz_class t = ((target - h % pz) % pz + pz) % pz * ginv % pz;
        h += g * t;  // stays in [0, g * p)
        g *= pz;
    }
    return {g, h};
}

LinearSystem build_system(const mpz_class& g, const mpz_class& h, const OffsetTuple& offsets) {
    if (g < 1) throw ArgumentError("build_system: g must be >= 1");
    LinearSystem sys;
    for (int64_t hi : offsets.offsets) sys.forms.push_back({g, h + hi});
    if (!is_admissible(sys))
        throw InternalError("build_system: constructed system is not admissible");
    return sys;
}

bool verify_survivors(const ResidueAssignment& residues, double z, const OffsetTuple& offsets) {
    int64_t Z = static_cast<int64_t>(std::floor(z));
    std::vector<uint8_t> alive(static_cast<size_t>(Z) + 1, 1);
    for (auto [p, a] : residues.classes) {
        int64_t start = (a == 0) ? static_cast<int64_t>(p) : static_cast<int64_t>(a % p);
        for (int64_t t = start; t <= Z; t += static_cast<int64_t>(p)) alive[t] = 0;
    }
    std::vector<int64_t> survivors;
    for (int64_t t = 1; t <= Z; ++t)
        if (alive[t]) survivors.push_back(t);
    return survivors == offsets.offsets;
}

LinearSystem Construction::system() const { return build_system(g, h, offsets); }

Construction make_construction(const ConstructionParams& params,
                               const std::vector<double>& targets, uint64_t seed) {
    Construction c;
    c.params = params;
    c.seed = seed;
    auto sres = sieve_residues(params.y, params.z, params.B, params.k, targets, seed);
    c.residues = std::move(sres.residues);
    c.offsets.offsets = std::move(sres.survivors);
    auto [g, h] = crt_combine(c.residues);
    c.g = std::move(g);
    c.h = std::move(h);

    if (!verify_survivors(c.residues, params.z, c.offsets))
        throw InternalError("make_construction: survivor identity failed");
    build_system(c.g, c.h, c.offsets);  // admissibility assertion
    for (int64_t hi : c.offsets.offsets) {
        mpz_class d = gcd(c.g, mpz_class(c.h + hi));
        if (d != 1) throw InternalError("make_construction: gcd(g, h + h_i) != 1");
    }
    return c;
}

WindowIdentityReport verify_window_identity(const Construction& c,
                                            const std::vector<mpz_class>& n_samples,
                                            int rounds) {
    int64_t Z = static_cast<int64_t>(std::floor(c.params.z));
    std::set<int64_t> offset_set(c.offsets.offsets.begin(), c.offsets.offsets.end());

    WindowIdentityReport report;
    report.all_ok = true;
    for (const auto& n : n_samples) {
        WindowSampleRecord rec;
        rec.n = n;
        rec.window_start = c.g * n + c.h;
        rec.all_certified = true;
        for (int64_t t = 1; t <= Z; ++t) {
            mpz_class value = rec.window_start + t;
            if (offset_set.count(t)) {
                rec.offset_primality.emplace_back(t, is_prime_big(value, rounds).probably_prime());
                continue;
            }
            uint64_t cert = 0;
            for (auto [p, a] : c.residues.classes) {
                if (static_cast<uint64_t>(t % static_cast<int64_t>(p)) == a) {
                    if (!mpz_divisible_ui_p(value.get_mpz_t(), p))
                        throw InternalError("verify_window_identity: certificate does not divide");
                    cert = p;
                    break;
                }
            }
            if (cert == 0) rec.all_certified = false;
            rec.certificates.emplace_back(t, cert);
        }
        report.all_ok = report.all_ok && rec.all_certified;
        report.samples.push_back(std::move(rec));
    }
    return report;
}

TheoremReport theorem_report(const Construction& c, double x) {
    if (!(x > 1)) throw ArgumentError("theorem_report: x must be > 1");
    TheoremReport r;
    r.y = c.params.y;
    r.log_g = log_mpz(c.g);
    if (x < 9e18) {
        r.X = 4 * c.g * mpz_class(static_cast<unsigned long>(std::llround(x)));
    }
    r.log_X = std::log(4.0) + r.log_g + std::log(x);
    double l2 = std::log(r.log_X);
    double l3 = std::log(l2);
    double l4 = std::log(l3);
    r.epsilon_X = (l4 * l4) / l3;
    r.log_X_power = (1.0 - r.epsilon_X) * r.log_X;
    r.log_claimed_count =
        std::log(x) - c.params.k * (c.params.C + std::log(std::log(x)));
    return r;
}

std::string Construction::to_json() const {
    nlohmann::json j;
    j["params"] = {{"lambda", params.lambda}, {"m", params.m},     {"C", params.C},
                   {"k", params.k},           {"v", params.v},     {"y", params.y},
                   {"z", params.z},           {"B", params.B},     {"betas", params.betas},
                   {"override_mode", params.override_mode}};
    nlohmann::json res = nlohmann::json::array();
    for (auto [p, a] : residues.classes) res.push_back({p, a});
    j["residues"] = res;
    j["offsets"] = offsets.offsets;
    j["g"] = g.get_str();
    j["h"] = h.get_str();
    j["seed"] = seed;
    return j.dump(2);
}

Construction Construction::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Construction c;
    const auto& p = j.at("params");
    c.params.lambda = p.at("lambda").get<double>();
    c.params.m = p.at("m").get<int>();
    c.params.C = p.at("C").get<double>();
    c.params.k = p.at("k").get<int>();
    c.params.v = p.value("v", 1.0);
    c.params.y = p.at("y").get<double>();
    c.params.z = p.at("z").get<double>();
    c.params.B = p.at("B").get<uint64_t>();
    c.params.betas = p.value("betas", std::vector<double>{});
    c.params.override_mode = p.value("override_mode", true);
    for (const auto& pa : j.at("residues"))
        c.residues.classes[pa.at(0).get<uint64_t>()] = pa.at(1).get<uint64_t>();
    c.offsets.offsets = j.at("offsets").get<std::vector<int64_t>>();
    c.g.set_str(j.at("g").get<std::string>(), 10);
    c.h.set_str(j.at("h").get<std::string>(), 10);
    c.seed = j.value("seed", uint64_t{0});
    return c;
}

}  // namespace pslab
