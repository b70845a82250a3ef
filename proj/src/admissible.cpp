#include "pslab/admissible.hpp"

#include <algorithm>
#include <sstream>

#include "pslab/errors.hpp"
#include "pslab/primality.hpp"

namespace pslab {

LinearSystem LinearSystem::from_offsets(const std::vector<mpz_class>& offsets) {
    LinearSystem sys;
    sys.forms.reserve(offsets.size());
    for (const auto& h : offsets) sys.forms.push_back({1, h});
    return sys;
}

std::set<uint64_t> occupied_residues(const LinearSystem& sys, uint64_t p) {
    if (!is_prime_small(p)) throw ArgumentError("occupied_residues: p must be prime");
    std::set<uint64_t> occ;
    mpz_class pz(static_cast<unsigned long>(p));
    for (const auto& f : sys.forms) {
        mpz_class gp = f.g % pz, hp = f.h % pz;
        if (hp < 0) hp += pz;
        if (gp == 0) {
            if (hp == 0) {
                for (uint64_t r = 0; r < p; ++r) occ.insert(r);
                return occ;
            }
            continue;  // no solutions from this form
        }
        mpz_class inv;
        mpz_invert(inv.get_mpz_t(), gp.get_mpz_t(), pz.get_mpz_t());
        mpz_class r = ((pz - hp) * inv) % pz;
        occ.insert(r.get_ui());
    }
    return occ;
}

bool are_distinct(const LinearSystem& sys) {
    for (size_t i = 0; i < sys.forms.size(); ++i)
        for (size_t j = i + 1; j < sys.forms.size(); ++j)
            if (sys.forms[i].g * sys.forms[j].h == sys.forms[j].g * sys.forms[i].h)
                return false;
    return true;
}

std::optional<uint64_t> admissibility_obstruction(const LinearSystem& sys) {
    if (sys.forms.empty()) throw ArgumentError("is_admissible: empty system");
    for (const auto& f : sys.forms)
        if (f.g < 1) throw ArgumentError("is_admissible: forms must have g >= 1");
    if (!are_distinct(sys)) throw ArgumentError("is_admissible: forms are not distinct");

    std::optional<uint64_t> worst;
    // A form identically zero mod p occupies every residue, so any prime
    // dividing gcd(g_i, h_i) obstructs, no matter how large.
    for (const auto& f : sys.forms) {
        mpz_class d = gcd(f.g, f.h);
        if (d > 1) {
            for (mpz_class p = 2; p * p <= d; p += (p == 2 ? 1 : 2))
                if (d % p == 0) { d = p; break; }
            uint64_t p = mpz_get_ui(d.get_mpz_t());
            if (!worst || p < *worst) worst = p;
        }
    }
    uint64_t k = sys.forms.size();
    for (uint64_t p = 2; p <= k && (!worst || p < *worst); ++p) {
        if (!is_prime_small(p)) continue;
        if (occupied_residues(sys, p).size() >= p) {
            worst = p;
            break;
        }
    }
    return worst;
}

bool is_admissible(const LinearSystem& sys) { return !admissibility_obstruction(sys); }

bool is_admissible_offsets(const OffsetTuple& tuple) {
    if (tuple.offsets.empty()) throw ArgumentError("is_admissible_offsets: empty tuple");
    for (size_t i = 1; i < tuple.offsets.size(); ++i)
        if (tuple.offsets[i] <= tuple.offsets[i - 1])
            throw ArgumentError("is_admissible_offsets: offsets must be strictly increasing");
    std::vector<mpz_class> hs(tuple.offsets.begin(), tuple.offsets.end());
    return is_admissible(LinearSystem::from_offsets(hs));
}

mpz_class euler_phi(const mpz_class& n) {
    if (n < 1) throw ArgumentError("euler_phi: n must be >= 1");
    mpz_class rest = n, result = 1;
    for (mpz_class p = 2; p * p <= rest; p += (p == 2 ? 1 : 2)) {
        if (rest % p != 0) continue;
        mpz_class pe = 1;
        while (rest % p == 0) { rest /= p; pe *= p; }
        result *= pe / p * (p - 1);
    }
    if (rest > 1) result *= rest - 1;
    return result;
}

mpz_class phi_L(const LinearForm& form, const mpz_class& q) {
    if (q < 1) throw ArgumentError("phi_L: q must be >= 1");
    if (form.g < 1) throw ArgumentError("phi_L: form must have g >= 1");
    mpz_class rest = q, result = 1;
    auto account = [&](const mpz_class& p, const mpz_class& pe) {
        // phi(g*q)/phi(g) gains p^e when p | g and phi(p^e) otherwise.
        if (mpz_divisible_p(form.g.get_mpz_t(), p.get_mpz_t()))
            result *= pe;
        else
            result *= pe / p * (p - 1);
    };
    for (mpz_class p = 2; p * p <= rest; p += (p == 2 ? 1 : 2)) {
        if (rest % p != 0) continue;
        mpz_class pe = 1;
        while (rest % p == 0) { rest /= p; pe *= p; }
        account(p, pe);
    }
    if (rest > 1) account(rest, rest);
    return result;
}

LinearSystem parse_system_text(const std::string& text) {
    LinearSystem sys;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string gs, hs;
        if (!(ls >> gs >> hs)) {
            if (gs.empty()) continue;  // blank line
            throw ArgumentError("system text: expected 'g h' per line, got: " + line);
        }
        LinearForm f;
        if (f.g.set_str(gs, 10) != 0 || f.h.set_str(hs, 10) != 0)
            throw ArgumentError("system text: bad integer in line: " + line);
        if (f.g < 1) throw ArgumentError("system text: g must be >= 1");
        sys.forms.push_back(std::move(f));
    }
    if (sys.forms.empty()) throw ArgumentError("system text: no forms given");
    return sys;
}

OffsetTuple parse_offsets(const std::string& csv) {
    OffsetTuple t;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(item, &pos);
        } catch (const std::exception&) {
            throw ArgumentError("offsets: bad integer: " + item);
        }
        if (pos != item.size()) throw ArgumentError("offsets: bad integer: " + item);
        t.offsets.push_back(v);
    }
    if (t.offsets.empty()) throw ArgumentError("offsets: empty list");
    std::sort(t.offsets.begin(), t.offsets.end());
    for (size_t i = 1; i < t.offsets.size(); ++i)
        if (t.offsets[i] == t.offsets[i - 1])
            throw ArgumentError("offsets: duplicate value");
    return t;
}

}  // namespace pslab
