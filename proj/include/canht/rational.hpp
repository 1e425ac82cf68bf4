#pragma once

#include <gmpxx.h>

#include <cmath>
#include <stdexcept>
#include <string>

namespace canht {

using Int = mpz_class;
using Rat = mpq_class;

// mpq_class(p, q) does not canonicalize on construction.
inline Rat make_rat(long p, long q = 1) {
    Rat r(p, q);
    r.canonicalize();
    return r;
}

inline Rat make_rat(const Int& p, const Int& q) {
    Rat r(p, q);
    r.canonicalize();
    return r;
}

// Parses "p/q" or "p" (base 10). Throws on malformed input.
inline Rat parse_rat(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0 || r.get_den() == 0)
        throw std::invalid_argument("not a rational: '" + s + "'");
    r.canonicalize();
    return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }

// log of a positive rational, safe for operands far beyond double range.
inline double log_rat(const Rat& r) {
    if (sgn(r) <= 0) throw std::domain_error("log_rat: nonpositive argument");
    signed long en, ed;
    double mn = mpz_get_d_2exp(&en, r.get_num().get_mpz_t());
    double md = mpz_get_d_2exp(&ed, r.get_den().get_mpz_t());
    return std::log(std::fabs(mn)) - std::log(std::fabs(md)) +
           (static_cast<double>(en) - static_cast<double>(ed)) * std::log(2.0);
}

inline double log_int(const Int& z) {
    if (sgn(z) == 0) throw std::domain_error("log_int: zero argument");
    signed long e;
    double m = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

inline size_t digits10(const Int& z) { return mpz_sizeinbase(z.get_mpz_t(), 10); }

inline size_t digits10(const Rat& r) {
    return std::max(digits10(Int(r.get_num())), digits10(Int(r.get_den())));
}

}  // namespace canht
