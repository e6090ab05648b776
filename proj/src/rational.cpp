#include "aggtreat/rational.hpp"

#include <cctype>

namespace aggtreat {

Rational rational_from_decimal(const std::string& text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    BigInt numerator = 0;
    BigInt denominator = 1;
    bool any_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_point) throw std::invalid_argument("bad decimal: " + text);
            seen_point = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("bad decimal: " + text);
        numerator = numerator * 10 + (c - '0');
        if (seen_point) denominator *= 10;
        any_digit = true;
    }
    if (!any_digit) throw std::invalid_argument("bad decimal: " + text);
    Rational r(numerator, denominator);
    return negative ? -r : r;
}

Rational snap_to_rational(double x, std::int64_t denominator) {
    if (!std::isfinite(x)) throw std::invalid_argument("snap_to_rational: non-finite value");
    double scaled = x * static_cast<double>(denominator);
    BigInt num(std::llround(scaled));
    return Rational(num, BigInt(denominator));
}

std::string fraction_string(const Rational& r) {
    if (boost::multiprecision::denominator(r) == 1)
        return boost::multiprecision::numerator(r).str();
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

}  // namespace aggtreat
