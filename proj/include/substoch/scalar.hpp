#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "substoch/error.hpp"

namespace substoch {

/// Exact backend: GMP rationals, always kept in lowest terms with a
/// positive denominator.
using Rational = mpq_class;

/// Comparison policy for the float backend. A difference passes when it is
/// within `rel` times the larger magnitude, or within `abs_floor` near zero.
struct Tolerance {
    double rel = 1e-9;
    double abs_floor = 1e-12;
};

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool is_exact = true;
    static constexpr const char* name = "exact";

    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static int sign(const Rational& x) { return sgn(x); }
    static Rational abs(const Rational& x) { return ::abs(x); }
    static double to_double(const Rational& x) { return x.get_d(); }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }

    static std::string to_string(const Rational& x)
    {
        if (x.get_den() == 1) {
            return x.get_num().get_str();
        }
        return x.get_num().get_str() + "/" + x.get_den().get_str();
    }

    static bool equal(const Rational& a, const Rational& b, const Tolerance& = {})
    {
        return a == b;
    }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool is_exact = false;
    static constexpr const char* name = "float";

    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static int sign(double x) { return (x > 0.0) - (x < 0.0); }
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static bool is_zero(double x) { return x == 0.0; }

    static std::string to_string(double x)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    static bool equal(double a, double b, const Tolerance& tol = {})
    {
        const double diff = std::fabs(a - b);
        if (diff <= tol.abs_floor) {
            return true;
        }
        return diff <= tol.rel * std::max(std::fabs(a), std::fabs(b));
    }
};

template <typename T>
concept Scalar = requires(const T& a, const T& b) {
    { a + b } -> std::convertible_to<T>;
    { a - b } -> std::convertible_to<T>;
    { a * b } -> std::convertible_to<T>;
    { a / b } -> std::convertible_to<T>;
    { ScalarTraits<T>::zero() } -> std::same_as<T>;
    { ScalarTraits<T>::sign(a) } -> std::same_as<int>;
};

namespace detail {

inline bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline std::string_view strip_sign(std::string_view s, bool& negative)
{
    negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    return s;
}

} // namespace detail

/// Parse an exact rational from "p", "p/q" or a decimal literal such as
/// "-0.125" or "2.5e-3". Decimals are converted exactly (0.1 becomes 1/10).
inline Rational parse_rational(std::string_view text)
{
    auto fail = [&] { return Error(Errc::ParseError, "not a rational number: '" + std::string(text) + "'"); };

    bool negative = false;
    std::string_view body = detail::strip_sign(text, negative);
    if (body.empty()) {
        throw fail();
    }

    Rational value;
    if (const auto slash = body.find('/'); slash != std::string_view::npos) {
        const std::string_view num = body.substr(0, slash);
        const std::string_view den = body.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den)) {
            throw fail();
        }
        mpz_class d(std::string(den), 10);
        if (d == 0) {
            throw Error(Errc::ParseError, "zero denominator in '" + std::string(text) + "'");
        }
        value = Rational(mpz_class(std::string(num), 10), d);
        value.canonicalize();
    } else {
        std::string_view mantissa = body;
        long exponent = 0;
        if (const auto e = body.find_first_of("eE"); e != std::string_view::npos) {
            mantissa = body.substr(0, e);
            bool exp_negative = false;
            std::string_view exp_digits = detail::strip_sign(body.substr(e + 1), exp_negative);
            if (!detail::all_digits(exp_digits) || exp_digits.size() > 6) {
                throw fail();
            }
            std::from_chars(exp_digits.data(), exp_digits.data() + exp_digits.size(), exponent);
            if (exp_negative) {
                exponent = -exponent;
            }
        }
        std::string digits;
        if (const auto dot = mantissa.find('.'); dot != std::string_view::npos) {
            const std::string_view int_part = mantissa.substr(0, dot);
            const std::string_view frac_part = mantissa.substr(dot + 1);
            if ((int_part.empty() && frac_part.empty())
                || (!int_part.empty() && !detail::all_digits(int_part))
                || (!frac_part.empty() && !detail::all_digits(frac_part))) {
                throw fail();
            }
            digits = std::string(int_part) + std::string(frac_part);
            exponent -= static_cast<long>(frac_part.size());
        } else {
            if (!detail::all_digits(mantissa)) {
                throw fail();
            }
            digits = std::string(mantissa);
        }
        mpz_class num(digits, 10);
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
        if (exponent >= 0) {
            value = Rational(num * scale);
        } else {
            value = Rational(num, scale);
            value.canonicalize();
        }
    }
    return negative ? Rational(-value) : value;
}

/// Parse a float entry; the whole token must be consumed.
inline double parse_double(std::string_view text)
{
    std::string_view s = text;
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
        throw Error(Errc::ParseError, "not a finite decimal number: '" + std::string(text) + "'");
    }
    return value;
}

template <Scalar T>
T scalar_from_rational(const Rational& x)
{
    if constexpr (std::same_as<T, Rational>) {
        return x;
    } else {
        return x.get_d();
    }
}

} // namespace substoch
