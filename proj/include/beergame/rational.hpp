#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace beergame {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Costs in the ledger are built from integer unit counts times a handful of
/// unit prices (0.5, 1.0 by default), so a reduced fraction never grows past a
/// few digits. Overflow is checked and reported instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        normalize();
    }

    [[nodiscard]] constexpr std::int64_t num() const { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const { return den_; }
    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const std::int64_t scale_a = b.den_ / g;
        const std::int64_t scale_b = a.den_ / g;
        return Rational(checked_add(checked_mul(a.num_, scale_a), checked_mul(b.num_, scale_b)),
                        checked_mul(a.den_, scale_a));
    }
    friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        const std::int64_t g1 = std::gcd(a.num_, b.den_) == 0 ? 1 : std::gcd(a.num_, b.den_);
        const std::int64_t g2 = std::gcd(b.num_, a.den_) == 0 ? 1 : std::gcd(b.num_, a.den_);
        return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
    }
    Rational& operator+=(const Rational& other) { return *this = *this + other; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        // Denominators are positive, so cross multiplication preserves order.
        return checked_mul(a.num_, b.den_) <=> checked_mul(b.num_, a.den_);
    }

    /// "p/q", or "p" for integers.
    [[nodiscard]] std::string to_fraction_string() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Exact decimal expansion when the denominator is of the form 2^a 5^b,
    /// always with at least one fractional digit ("6.0", "9.5", "0.25").
    /// Falls back to the fraction form otherwise.
    [[nodiscard]] std::string to_decimal_string() const {
        std::int64_t d = den_;
        int twos = 0, fives = 0;
        while (d % 2 == 0) { d /= 2; ++twos; }
        while (d % 5 == 0) { d /= 5; ++fives; }
        if (d != 1) return to_fraction_string();
        const int digits = std::max({twos, fives, 1});
        std::int64_t scale = 1;
        for (int i = 0; i < digits; ++i) scale = checked_mul(scale, 10);
        const std::int64_t scaled = checked_mul(num_, scale / den_);
        const std::int64_t mag = scaled < 0 ? -scaled : scaled;
        std::string frac = std::to_string(mag % scale);
        frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
        while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
        return (scaled < 0 ? "-" : "") + std::to_string(mag / scale) + "." + frac;
    }

    /// Parses "3", "-2", "0.5", "1.25", "1/3".
    static Rational parse(std::string_view text) {
        auto fail = [&] { return std::invalid_argument("Rational: cannot parse '" + std::string(text) + "'"); };
        if (text.empty()) throw fail();
        if (const auto slash = text.find('/'); slash != std::string_view::npos) {
            return Rational(parse_int(text.substr(0, slash), fail), parse_int(text.substr(slash + 1), fail));
        }
        const auto dot = text.find('.');
        if (dot == std::string_view::npos) return Rational(parse_int(text, fail));
        const std::string_view whole = text.substr(0, dot);
        const std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos) throw fail();
        const bool negative = !whole.empty() && whole.front() == '-';
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale = checked_mul(scale, 10);
        const std::int64_t int_part = (whole.empty() || whole == "-") ? 0 : parse_int(whole, fail);
        const std::int64_t frac_part = parse_int(frac, fail);
        const std::int64_t mag = checked_add(checked_mul(int_part < 0 ? -int_part : int_part, scale), frac_part);
        return Rational(negative ? -mag : mag, scale);
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    void normalize() {
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        const std::int64_t g = std::gcd(num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("Rational: multiplication overflow");
        return out;
    }
    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("Rational: addition overflow");
        return out;
    }
    template <class Fail>
    static std::int64_t parse_int(std::string_view s, Fail&& fail) {
        if (s.empty()) throw fail();
        std::size_t i = (s.front() == '-' || s.front() == '+') ? 1 : 0;
        if (i == s.size()) throw fail();
        std::int64_t v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw fail();
            v = checked_add(checked_mul(v, 10), s[i] - '0');
        }
        return s.front() == '-' ? -v : v;
    }
};

}  // namespace beergame
