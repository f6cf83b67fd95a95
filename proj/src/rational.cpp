#include "lchpm/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace lchpm {

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

const Rational& ExtendedRational::value() const {
    if (!value_) throw std::logic_error("ExtendedRational: value() on +inf");
    return *value_;
}

std::strong_ordering operator<=>(const ExtendedRational& a, const ExtendedRational& b) {
    if (a.is_infinite() || b.is_infinite()) {
        if (a.is_infinite() && b.is_infinite()) return std::strong_ordering::equal;
        return a.is_infinite() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (*a.value_ < *b.value_) return std::strong_ordering::less;
    if (*a.value_ > *b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string_view num = s, den = "1";
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        num = s.substr(0, slash);
        den = s.substr(slash + 1);
    }
    if (!all_digits(num) || !all_digits(den))
        throw RationalParseError("malformed rational '" + std::string(text) + "'");
    cpp_int n{std::string(num)}, d{std::string(den)};
    if (d == 0) throw RationalParseError("zero denominator in '" + std::string(text) + "'");
    Rational r(n, d);
    return negative ? Rational(-r) : r;
}

ExtendedRational parse_extended(std::string_view text) {
    if (text == "inf" || text == "+inf") return ExtendedRational::infinity();
    return parse_rational(text);
}

std::string to_string(const Rational& r) {
    const cpp_int& n = boost::multiprecision::numerator(r);
    const cpp_int& d = boost::multiprecision::denominator(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

std::string to_string(const ExtendedRational& r) {
    return r.is_infinite() ? std::string("inf") : to_string(r.value());
}

double to_double_up(const Rational& r) {
    double d = r.convert_to<double>();
    if (Rational(d) < r) d = std::nextafter(d, std::numeric_limits<double>::infinity());
    return d;
}

double to_double_down(const Rational& r) {
    double d = r.convert_to<double>();
    if (Rational(d) > r) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return d;
}

Rational from_double(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("from_double: non-finite value");
    return Rational(d);
}

}  // namespace lchpm
