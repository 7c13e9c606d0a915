#ifndef MONO_RATIONAL_HPP
#define MONO_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>
#include <stdexcept>

namespace mono {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline bool is_integer(const Rat& r) { return den(r) == 1; }

inline Int gcd_int(Int a, Int b) { return boost::multiprecision::gcd(a, b); }
inline Int lcm_int(const Int& a, const Int& b) { return boost::multiprecision::lcm(a, b); }

// floor(p/q) for exact rationals
inline Int rat_floor(const Rat& r) {
    Int n = num(r), d = den(r);
    Int q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// integer power with rational base, exponent in Z
inline Rat rat_pow(const Rat& base, long e) {
    if (e == 0) return Rat(1);
    if (base == 0) {
        if (e < 0) throw std::domain_error("rat_pow: zero to negative power");
        return Rat(0);
    }
    Rat b = e < 0 ? Rat(den(base), num(base)) : base;
    unsigned long k = e < 0 ? -(unsigned long)e : (unsigned long)e;
    Rat acc(1);
    while (k) {
        if (k & 1) acc *= b;
        b *= b;
        k >>= 1;
    }
    return acc;
}

// exact n-th root of an integer if it exists
inline bool int_nth_root(const Int& a, unsigned n, Int& out) {
    if (n == 0) throw std::domain_error("int_nth_root: n = 0");
    if (a < 0) {
        if (n % 2 == 0) return false;
        Int r;
        if (!int_nth_root(-a, n, r)) return false;
        out = -r;
        return true;
    }
    if (a == 0 || a == 1) { out = a; return true; }
    Int lo = 1, hi = a;
    while (lo < hi) {
        Int mid = (lo + hi + 1) / 2;
        Int p = 1;
        bool over = false;
        for (unsigned i = 0; i < n; ++i) {
            p *= mid;
            if (p > a) { over = true; break; }
        }
        if (over) hi = mid - 1; else lo = mid;
    }
    Int p = 1;
    for (unsigned i = 0; i < n; ++i) p *= lo;
    if (p == a) { out = lo; return true; }
    return false;
}

// exact q-th root of a rational if it exists in Q
inline bool rat_nth_root(const Rat& a, unsigned n, Rat& out) {
    Int rn, rd;
    if (!int_nth_root(num(a), n, rn)) return false;
    if (!int_nth_root(den(a), n, rd)) return false;
    out = Rat(rn, rd);
    return true;
}

// a^(p/q) when it exists in Q
inline bool rat_pow_exact(const Rat& base, const Rat& e, Rat& out) {
    if (base == 0) {
        if (e <= 0) return false;
        out = 0;
        return true;
    }
    Int p = num(e), q = den(e);
    Rat root;
    if (!rat_nth_root(base, (unsigned)q, root)) return false;
    if (boost::multiprecision::abs(p) > 1000000) return false;
    out = rat_pow(root, (long)p);
    return true;
}

std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& s);

} // namespace mono

#endif
