#pragma once

// Exact rational numbers backed by GMP, plus the textual forms used in
// behavior, Bell and report files ("a/b" or a bare integer).

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bellkit {

// mpq_class keeps results canonical after every arithmetic operation; the only
// way to get a non-canonical value is raw construction, which parse_rational
// never hands out.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

} // namespace detail

/// Parses "a/b", "-a/b" or "a". The denominator must be a positive integer.
inline Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const std::string_view num = body.substr(0, slash);
    const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den))
        throw ParseError("malformed rational \"" + std::string(text) + "\"");

    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in rational \"" + std::string(text) + "\"");
    if (negative) n = -n;
    Rational r(n, d);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Decimal rendering rounded half away from zero to `digits` places.
inline std::string to_decimal(const Rational& r, int digits = 6) {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    Rational scaled = abs(r) * scale;
    mpz_class rounded = (scaled.get_num() * 2 + scaled.get_den()) / (scaled.get_den() * 2);
    std::string s = rounded.get_str();
    if (digits > 0) {
        if (s.size() <= static_cast<std::size_t>(digits)) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
        s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    }
    if (sgn(r) < 0 && rounded != 0) s.insert(0, "-");
    return s;
}

inline Rational dot(const RationalVector& a, const RationalVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    Rational sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) sum += a[i] * b[i];
    return sum;
}

} // namespace bellkit
