#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mero {

/// Exact scalar field: arbitrary-precision rationals. Expression templates
/// are disabled so values behave like ordinary scalars in generic code.
using Rat = boost::multiprecision::number<
    boost::multiprecision::backends::rational_adaptor<
        boost::multiprecision::backends::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using BigInt =
    boost::multiprecision::number<boost::multiprecision::backends::cpp_int_backend<>,
                                  boost::multiprecision::et_off>;

// Customization point for the coefficient ring used by Poly<R>. The same
// polynomial code runs over double, Rat, and Poly<K> coefficients (the
// nested case carries the bivariate expansion in symm.hpp).
template <class R>
struct ring_traits;

template <>
struct ring_traits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from_int(long long n) { return static_cast<double>(n); }
    static bool is_zero(const double& c) { return c == 0.0; }
    static double magnitude(const double& c) { return std::fabs(c); }
    // Trailing coefficients below this fraction of the largest one are
    // expansion round-off, not genuine degree.
    static bool negligible(const double& c, double scale) {
        return std::fabs(c) <= 1e-13 * scale;
    }
};

template <>
struct ring_traits<Rat> {
    static constexpr bool exact = true;
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static Rat from_int(long long n) { return Rat(n); }
    static bool is_zero(const Rat& c) { return c.is_zero(); }
    static double magnitude(const Rat& c) {
        return std::fabs(c.convert_to<double>());
    }
    static bool negligible(const Rat& c, double) { return c.is_zero(); }
};

inline double to_double(const double& c) { return c; }
inline double to_double(const Rat& c) { return c.convert_to<double>(); }
inline long double to_long_double(const double& c) { return c; }
inline long double to_long_double(const Rat& c) {
    return c.convert_to<long double>();
}

/// Parses "7", "-3/4" or "2.125" (finite decimal) into an exact rational.
inline Rat rat_from_string(const std::string& text) {
    std::string s = text;
    // strip spaces
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        BigInt num(t.substr(0, slash));
        BigInt den(t.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        return Rat(num, den);
    }
    auto dot = t.find('.');
    if (dot == std::string::npos) return Rat(BigInt(t));
    std::string digits = t.substr(0, dot) + t.substr(dot + 1);
    std::size_t frac_len = t.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("bad rational literal: " + text);
    BigInt num(digits);
    BigInt den(1);
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rat(num, den);
}

inline std::string scalar_to_string(const double& c) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return buf;
}

inline std::string scalar_to_string(const Rat& c) { return c.str(); }

}  // namespace mero
