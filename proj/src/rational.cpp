#include "freerg/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace freerg {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

Int parse_int(const std::string& s) {
    if (s.empty()) throw input_error("empty integer literal");
    size_t k = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (k == s.size()) throw input_error("bad integer literal '" + s + "'");
    for (size_t i = k; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw input_error("bad integer literal '" + s + "'");
    return Int(s);
}

} // namespace

Rat parse_rational(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw input_error("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num = parse_int(trim(s.substr(0, slash)));
        Int den = parse_int(trim(s.substr(slash + 1)));
        if (den == 0) throw input_error("zero denominator in '" + raw + "'");
        return Rat(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
        if (head.empty() || head == "+" || head == "-") head += "0";
        for (char c : tail)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw input_error("bad decimal literal '" + raw + "'");
        Rat r(parse_int(head));
        if (!tail.empty()) {
            Int digits = parse_int(tail);
            Int scale = 1;
            for (size_t i = 0; i < tail.size(); ++i) scale *= 10;
            Rat frac(digits, scale);
            bool neg = trim(head)[0] == '-';
            r += neg ? -frac : frac;
        }
        return r;
    }
    return Rat(parse_int(s));
}

std::string format_rational(const Rat& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::optional<Rat> rat_sqrt(const Rat& r) {
    if (r < 0) return std::nullopt;
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    Int sn = boost::multiprecision::sqrt(num);
    Int sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rat(sn, sd);
}

std::optional<Rat> rat_from_double(double x) {
    if (!std::isfinite(x)) return std::nullopt;
    Rat r(x); // exact binary value
    Int den = boost::multiprecision::denominator(r);
    if (den > Int(1) << 20) return std::nullopt;
    return r;
}

double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

double Q2::to_double() const {
    static const double s2 = std::sqrt(2.0);
    return a.convert_to<double>() + b.convert_to<double>() * s2;
}

std::string Q2::str() const {
    if (b == 0) return format_rational(a);
    if (a == 0) return format_rational(b) + "*sqrt2";
    return format_rational(a) + " + " + format_rational(b) + "*sqrt2";
}

Q2 pow2_half(long m) {
    long q = (m >= 0) ? m / 2 : (m - 1) / 2; // floor division
    int r = static_cast<int>(m - 2 * q);
    Rat base = rat_pow(Rat(2), q);
    return r == 0 ? Q2(base) : Q2(Rat(0), base);
}

Rat rat_pow(const Rat& r, long e) {
    if (e == 0) return Rat(1);
    if (e < 0) {
        if (r == 0) throw input_error("negative power of zero");
        return Rat(1) / rat_pow(r, -e);
    }
    Rat acc(1), base = r;
    long n = e;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

} // namespace freerg
