#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gwpt {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_pow(const Rational& base, long e) {
    if (e == 0)
        return Rational(1);
    if (base == 0) {
        if (e < 0)
            throw std::domain_error("rational_pow: zero to negative power");
        return Rational(0);
    }
    Rational b = e < 0 ? Rational(1) / base : base;
    long n = e < 0 ? -e : e;
    Rational acc(1);
    while (n > 0) {
        if (n & 1)
            acc *= b;
        b *= b;
        n >>= 1;
    }
    return acc;
}

inline int parity_sign(long e) { return (e % 2 == 0) ? 1 : -1; }

inline Rational factorial(long n) {
    if (n < 0)
        throw std::domain_error("factorial of negative integer");
    Integer acc(1);
    for (long k = 2; k <= n; k++)
        acc *= k;
    return Rational(acc);
}

// Parses "a/b" or "a"; throws on malformed input.
Rational parse_rational(const std::string& text);

std::string to_string(const Rational& q);

} // namespace gwpt
