#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

#include "freerg/errors.hpp"

namespace freerg {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Parse "p/q", "p", or a plain decimal string ("0.25") into an exact rational.
Rat parse_rational(const std::string& s);

// "p/q" when the denominator is not 1, otherwise just "p".
std::string format_rational(const Rat& r);

// Exact square root if r is a perfect square of a rational, nullopt otherwise.
std::optional<Rat> rat_sqrt(const Rat& r);

// Exact rational capture of a double when its binary expansion has a small
// denominator (<= 2^20); used to keep JSON-number inputs like 0.5 exact.
std::optional<Rat> rat_from_double(double x);

double rat_to_double(const Rat& r);

// Element of the field Q(sqrt 2), stored as a + b*sqrt(2) with a, b rational.
// The renormalization scale factors 2^{m/2} live here exactly.
struct Q2 {
    Rat a{0};
    Rat b{0};

    Q2() = default;
    Q2(int v) : a(v) {}              // NOLINT: implicit for scalar-generic code
    Q2(const Rat& av) : a(av) {}     // NOLINT
    Q2(Rat av, Rat bv) : a(std::move(av)), b(std::move(bv)) {}

    friend Q2 operator+(const Q2& x, const Q2& y) { return {x.a + y.a, x.b + y.b}; }
    friend Q2 operator-(const Q2& x, const Q2& y) { return {x.a - y.a, x.b - y.b}; }
    friend Q2 operator-(const Q2& x) { return {-x.a, -x.b}; }
    friend Q2 operator*(const Q2& x, const Q2& y) {
        return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a};
    }
    friend bool operator==(const Q2& x, const Q2& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Q2& x, const Q2& y) { return !(x == y); }

    bool is_rational() const { return b == 0; }
    double to_double() const;
    std::string str() const; // "a" or "a + b*sqrt2"
};

// 2^{m/2} as an exact Q2 value, any integer m (negative allowed).
Q2 pow2_half(long m);

// Exact integer power of a rational (e negative allowed, r != 0 then).
Rat rat_pow(const Rat& r, long e);

} // namespace freerg
