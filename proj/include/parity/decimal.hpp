#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace parity {

/// Signed fixed-point number with 18 fractional digits.
///
/// Used for every ledger quantity (currency amounts, token quantities,
/// prices, ledger-side weights). Addition and subtraction are exact;
/// multiplication and division truncate toward zero at the 18th digit.
/// Operations that leave the representable range throw Error(Overflow).
class Decimal {
public:
    using Raw = __int128;
    static constexpr int kScaleDigits = 18;
    static constexpr Raw kScale = static_cast<Raw>(1'000'000'000'000'000'000LL);

    constexpr Decimal() = default;
    constexpr Decimal(int value) : raw_(static_cast<Raw>(value) * kScale) {}  // NOLINT: implicit by intent
    static constexpr Decimal from_raw(Raw raw) {
        Decimal d;
        d.raw_ = raw;
        return d;
    }

    /// Parses plain decimal notation ("-12.5", "0.000001"). Digits past the
    /// 18th fractional place are truncated.
    static Decimal parse(std::string_view text);
    /// Shortest round-trip representation of the double, then parsed.
    static Decimal from_double(double value);

    constexpr Raw raw() const { return raw_; }
    double to_double() const;
    /// Canonical text: no exponent, no trailing fractional zeros.
    std::string to_string() const;

    static constexpr Decimal zero() { return {}; }
    static constexpr Decimal one() { return from_raw(kScale); }

    constexpr bool is_zero() const { return raw_ == 0; }
    constexpr bool is_negative() const { return raw_ < 0; }
    constexpr bool is_positive() const { return raw_ > 0; }

    friend constexpr auto operator<=>(Decimal a, Decimal b) = default;
    friend constexpr bool operator==(Decimal a, Decimal b) = default;

    friend Decimal operator+(Decimal a, Decimal b);
    friend Decimal operator-(Decimal a, Decimal b);
    friend constexpr Decimal operator-(Decimal a) { return from_raw(-a.raw_); }
    friend Decimal operator*(Decimal a, Decimal b);
    friend Decimal operator/(Decimal a, Decimal b);

    Decimal& operator+=(Decimal o) { return *this = *this + o; }
    Decimal& operator-=(Decimal o) { return *this = *this - o; }
    Decimal& operator*=(Decimal o) { return *this = *this * o; }
    Decimal& operator/=(Decimal o) { return *this = *this / o; }

    /// a * b / c with a single truncation.
    static Decimal mul_div(Decimal a, Decimal b, Decimal c);

private:
    Raw raw_ = 0;
};

inline Decimal max(Decimal a, Decimal b) { return a < b ? b : a; }
inline Decimal min(Decimal a, Decimal b) { return a < b ? a : b; }
inline Decimal clamp_nonnegative(Decimal a) { return a.is_negative() ? Decimal{} : a; }

std::ostream& operator<<(std::ostream& os, Decimal d);

}  // namespace parity
