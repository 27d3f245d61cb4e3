#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace parity {

/// A UTC calendar day.
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}

    /// Strict ISO-8601 "YYYY-MM-DD".
    static Date parse(std::string_view text);
    std::string to_string() const;

    constexpr std::chrono::sys_days days() const { return days_; }
    /// Whole days from `earlier` to this date (negative if this is earlier).
    constexpr long days_since(Date earlier) const { return (days_ - earlier.days_).count(); }
    constexpr Date plus_days(long n) const { return Date(days_ + std::chrono::days(n)); }

    friend constexpr auto operator<=>(Date, Date) = default;
    friend constexpr bool operator==(Date, Date) = default;

private:
    std::chrono::sys_days days_{};
};

}  // namespace parity
