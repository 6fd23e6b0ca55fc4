#pragma once

// Numeric value abstraction. Every engine is a template over T, instantiated
// either with exact GMP rationals or with double.

#include "errors.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <type_traits>

namespace resetwalks {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

enum class NumericMode { Exact, Float };

template <class T>
double to_double(const T& v) {
    if constexpr (is_exact_v<T>) {
        return v.template convert_to<double>();
    } else {
        return static_cast<double>(v);
    }
}

template <class To, class From>
To numeric_cast(const From& v) {
    if constexpr (std::is_same_v<To, From>) {
        return v;
    } else if constexpr (is_exact_v<From>) {
        return static_cast<To>(to_double(v));
    } else {
        return To(v);
    }
}

/// Absolute value usable for both instantiations.
template <class T>
T abs_value(const T& v) {
    return v < T(0) ? T(-v) : v;
}

/// Integer power with negative exponents allowed (base must be nonzero then).
template <class T>
T ipow(T base, long long e) {
    if (e < 0) {
        RESETWALKS_REQUIRE(base != T(0), ErrorCode::InvalidArgument, "ipow: zero base, negative exponent");
        base = T(1) / base;
        e = -e;
    }
    T result(1);
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

/// Tolerance used when checking that probabilities sum to one.
template <class T>
T stochastic_tolerance() {
    if constexpr (is_exact_v<T>) {
        return T(0);
    } else {
        return T(1e-12);
    }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

inline BigInt parse_integer(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    if (!all_digits(s)) throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(s) + "'");
    // GMP reads a leading 0 as an octal prefix.
    while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
    BigInt v{std::string(s)};
    return neg ? BigInt(-v) : v;
}

// Decimal literal such as "0.25", "-1.5e-3" converted exactly.
inline Rational parse_decimal(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    long long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        auto tail = s.substr(e + 1);
        if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
        auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), exp10);
        if (ec != std::errc() || ptr != tail.data() + tail.size())
            throw Error(ErrorCode::ParseError, "bad exponent in '" + std::string(s) + "'");
        s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        auto ip = s.substr(0, dot);
        auto fp = s.substr(dot + 1);
        if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty()))
            throw Error(ErrorCode::ParseError, "bad decimal '" + std::string(s) + "'");
        digits = std::string(ip) + std::string(fp);
        exp10 -= static_cast<long long>(fp.size());
    } else {
        if (!all_digits(s)) throw Error(ErrorCode::ParseError, "bad number '" + std::string(s) + "'");
        digits = std::string(s);
    }
    Rational v{parse_integer(digits)};
    v *= ipow(Rational(10), exp10);
    return neg ? Rational(-v) : v;
}

} // namespace detail

/// Parses "a/b", an integer, or a decimal literal into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto s = detail::trim(text);
    if (s.empty()) throw Error(ErrorCode::ParseError, "empty number");
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = detail::parse_integer(detail::trim(s.substr(0, slash)));
        auto den = detail::parse_integer(detail::trim(s.substr(slash + 1)));
        if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(s) + "'");
        return Rational(num, den);
    }
    if (s.find_first_of(".eE") != std::string_view::npos) return detail::parse_decimal(s);
    return Rational(detail::parse_integer(s));
}

template <class T>
T parse_value(std::string_view text) {
    if constexpr (is_exact_v<T>) {
        return parse_rational(text);
    } else {
        return static_cast<T>(to_double(parse_rational(text)));
    }
}

/// "a/b" (or "a" for integers) in exact mode, shortest round-trip decimal for doubles.
template <class T>
std::string to_string_value(const T& v) {
    if constexpr (is_exact_v<T>) {
        const auto num = boost::multiprecision::numerator(v);
        const auto den = boost::multiprecision::denominator(v);
        if (den == 1) return num.str();
        return num.str() + "/" + den.str();
    } else {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<double>(v));
        return std::string(buf, ptr);
    }
}

} // namespace resetwalks
