#include "parity/decimal.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <charconv>
#include <limits>
#include <ostream>

#include "parity/error.hpp"

namespace parity {

namespace {

using Wide = boost::multiprecision::int256_t;

constexpr Decimal::Raw kRawMax = std::numeric_limits<Decimal::Raw>::max();
constexpr Decimal::Raw kRawMin = std::numeric_limits<Decimal::Raw>::min();

Wide widen(Decimal::Raw v) {
    // cpp_int has no __int128 constructor on every boost version; go through halves.
    const bool neg = v < 0;
    unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
    Wide w = static_cast<std::uint64_t>(mag >> 64);
    w <<= 64;
    w += static_cast<std::uint64_t>(mag & 0xFFFFFFFFFFFFFFFFULL);
    return neg ? Wide(-w) : w;
}

Decimal::Raw narrow(const Wide& w) {
    if (w > widen(kRawMax) || w < widen(kRawMin)) fail(ErrorCode::Overflow, "decimal overflow");
    const bool neg = w < 0;
    Wide mag = neg ? Wide(-w) : w;
    const auto hi = static_cast<std::uint64_t>(mag >> 64);
    const auto lo = static_cast<std::uint64_t>(mag & Wide(0xFFFFFFFFFFFFFFFFULL));
    unsigned __int128 u = (static_cast<unsigned __int128>(hi) << 64) | lo;
    if (neg) return u == (static_cast<unsigned __int128>(1) << 127) ? kRawMin : -static_cast<Decimal::Raw>(u);
    return static_cast<Decimal::Raw>(u);
}

}  // namespace

Decimal operator+(Decimal a, Decimal b) {
    Decimal::Raw out;
    if (__builtin_add_overflow(a.raw_, b.raw_, &out)) fail(ErrorCode::Overflow, "decimal overflow in +");
    return Decimal::from_raw(out);
}

Decimal operator-(Decimal a, Decimal b) {
    Decimal::Raw out;
    if (__builtin_sub_overflow(a.raw_, b.raw_, &out)) fail(ErrorCode::Overflow, "decimal overflow in -");
    return Decimal::from_raw(out);
}

Decimal operator*(Decimal a, Decimal b) {
    // int256 division truncates toward zero.
    return Decimal::from_raw(narrow(widen(a.raw_) * widen(b.raw_) / widen(Decimal::kScale)));
}

Decimal operator/(Decimal a, Decimal b) {
    if (b.raw_ == 0) fail(ErrorCode::Domain, "decimal division by zero");
    return Decimal::from_raw(narrow(widen(a.raw_) * widen(Decimal::kScale) / widen(b.raw_)));
}

Decimal Decimal::mul_div(Decimal a, Decimal b, Decimal c) {
    if (c.raw_ == 0) fail(ErrorCode::Domain, "decimal division by zero");
    return from_raw(narrow(widen(a.raw_) * widen(b.raw_) / widen(c.raw_)));
}

Decimal Decimal::parse(std::string_view text) {
    if (text.empty()) fail(ErrorCode::Parse, "empty decimal");
    std::size_t i = 0;
    bool neg = false;
    if (text[0] == '-' || text[0] == '+') {
        neg = text[0] == '-';
        ++i;
    }
    Wide integral = 0;
    Wide fraction = 0;
    int frac_digits = 0;
    bool seen_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '.') {
            if (seen_point) fail(ErrorCode::Parse, "malformed decimal '" + std::string(text) + "'");
            seen_point = true;
            continue;
        }
        if (ch < '0' || ch > '9') fail(ErrorCode::Parse, "malformed decimal '" + std::string(text) + "'");
        seen_digit = true;
        if (!seen_point) {
            integral = integral * 10 + (ch - '0');
            if (integral > widen(kRawMax)) fail(ErrorCode::Overflow, "decimal overflow parsing '" + std::string(text) + "'");
        } else if (frac_digits < kScaleDigits) {
            fraction = fraction * 10 + (ch - '0');
            ++frac_digits;
        }
    }
    if (!seen_digit) fail(ErrorCode::Parse, "malformed decimal '" + std::string(text) + "'");
    for (; frac_digits < kScaleDigits; ++frac_digits) fraction *= 10;
    Wide total = integral * widen(kScale) + fraction;
    return from_raw(narrow(neg ? Wide(-total) : total));
}

Decimal Decimal::from_double(double value) {
    if (!(value == value) || value == std::numeric_limits<double>::infinity() ||
        value == -std::numeric_limits<double>::infinity())
        fail(ErrorCode::Domain, "non-finite value cannot become a decimal");
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
    if (ec != std::errc{}) fail(ErrorCode::Overflow, "double too large for decimal");
    return parse(std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data())));
}

double Decimal::to_double() const {
    const Raw whole = raw_ / kScale;
    const Raw frac = raw_ % kScale;
    return static_cast<double>(whole) + static_cast<double>(frac) / 1e18;
}

std::string Decimal::to_string() const {
    const bool neg = raw_ < 0;
    unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-(raw_ + 1)) + 1 : static_cast<unsigned __int128>(raw_);
    const auto scale = static_cast<unsigned __int128>(kScale);
    unsigned __int128 whole = mag / scale;
    unsigned __int128 frac = mag % scale;

    std::string int_part;
    do {
        int_part.insert(int_part.begin(), static_cast<char>('0' + static_cast<int>(whole % 10)));
        whole /= 10;
    } while (whole != 0);

    std::string out = neg ? "-" + int_part : int_part;
    if (frac != 0) {
        std::string frac_part(kScaleDigits, '0');
        for (int k = kScaleDigits - 1; k >= 0; --k) {
            frac_part[static_cast<std::size_t>(k)] = static_cast<char>('0' + static_cast<int>(frac % 10));
            frac /= 10;
        }
        while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
        out += '.';
        out += frac_part;
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, Decimal d) { return os << d.to_string(); }

}  // namespace parity
