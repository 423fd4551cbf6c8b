#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "fiscids/errors.hpp"

namespace fiscids {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_pow(const Rational& base, long exponent) {
    if (exponent == 0) return Rational(1);
    if (exponent < 0) {
        if (base == 0) throw DomainError("zero raised to a negative power");
        return Rational(1) / rational_pow(base, -exponent);
    }
    Rational acc(1), b = base;
    unsigned long e = static_cast<unsigned long>(exponent);
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// Canonical "p/q" text (plain "p" when the denominator is one).
inline std::string rational_to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

// Accepts "p", "p/q", and an optional leading sign on either part.
inline Rational rational_from_string(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(text));
        Integer num(text.substr(0, slash));
        Integer den(text.substr(slash + 1));
        if (den == 0) throw ZeroDenominator();
        return Rational(num, den);
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception&) {
        throw Error("malformed rational literal '" + text + "'");
    }
}

// True when r = (p/q)^2 for some rational, filling root with the nonnegative root.
inline bool rational_sqrt(const Rational& r, Rational& root) {
    if (r < 0) return false;
    Integer num = numerator(r), den = denominator(r);
    Integer ns = boost::multiprecision::sqrt(num);
    Integer ds = boost::multiprecision::sqrt(den);
    if (ns * ns != num || ds * ds != den) return false;
    root = Rational(ns, ds);
    return true;
}

}  // namespace fiscids
