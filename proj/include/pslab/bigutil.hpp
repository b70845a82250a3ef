#pragma once

#include <cmath>
#include <cstdint>

#include <gmpxx.h>

namespace pslab {

// Natural log of a positive big integer, full double precision regardless of
// magnitude (mpz_get_d alone would saturate past ~2^1024).
inline double log_mpz(const mpz_class& v) {
    signed long e = 0;
    double d = mpz_get_d_2exp(&e, v.get_mpz_t());
    return std::log(d) + static_cast<double>(e) * M_LN2;
}

inline bool fits_u64(const mpz_class& v) {
    return v >= 0 && mpz_fits_ulong_p(v.get_mpz_t());
}

}  // namespace pslab
