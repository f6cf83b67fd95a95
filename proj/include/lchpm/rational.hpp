#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lchpm {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                              boost::multiprecision::et_off>;

/// Action (time-length) of a chord or word. Always exact.
using Action = Rational;

/// A rational value or +infinity.
class ExtendedRational {
public:
    ExtendedRational() = default;  // +infinity
    ExtendedRational(Rational v) : value_(std::move(v)) {}
    ExtendedRational(int v) : value_(Rational(v)) {}

    static ExtendedRational infinity() { return ExtendedRational(); }

    bool is_infinite() const { return !value_.has_value(); }
    bool is_finite() const { return value_.has_value(); }

    /// Throws std::logic_error when infinite.
    const Rational& value() const;

    friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) = default;
    friend std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b);

private:
    std::optional<Rational> value_;
};

class RationalParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses "p", "p/q" or "-p/q". Decimal points are rejected.
Rational parse_rational(std::string_view text);

/// Like parse_rational, but also accepts "inf".
ExtendedRational parse_extended(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);
std::string to_string(const ExtendedRational& r);

/// Nearest double at or above r.
double to_double_up(const Rational& r);
/// Nearest double at or below r.
double to_double_down(const Rational& r);
/// Exact conversion of a finite double.
Rational from_double(double d);

}  // namespace lchpm
