#pragma once

#include <array>
#include <vector>

#include "parity/date.hpp"
#include "parity/decimal.hpp"
#include "parity/geometry.hpp"

namespace parity {

/// Holdings younger than `max_holding_days` pay `penalty_rate`.
struct RedemptionTier {
    long max_holding_days = 0;
    Decimal penalty_rate;
    friend bool operator==(const RedemptionTier&, const RedemptionTier&) = default;
};

enum class Channel { Direct, Parity };

struct FeeSchedule {
    Decimal deposit_rate;
    Decimal pref_change_rate;
    Decimal pref_change_cap;
    /// Half-open day intervals [prev bound, max_holding_days); past the last
    /// bound the penalty is zero.
    std::vector<RedemptionTier> redemption_tiers;
    /// Sub-fund deposit rates, indexed by Fund, for direct investors and for
    /// the parity channel.
    std::array<Decimal, 3> subfund_direct_rates{};
    std::array<Decimal, 3> subfund_parity_rates{};

    /// Sample schedule: 5%/4%/3% penalties under 30/60/90 days, 0.5% direct
    /// and 0.3% parity-channel sub-fund deposit rates.
    static FeeSchedule defaults();
    /// Throws InvalidArgument on rates outside [0, 1] or misordered tiers.
    void validate() const;

    friend bool operator==(const FeeSchedule&, const FeeSchedule&) = default;
};

struct DepositLot {
    Date when;
    Decimal amount;
    friend bool operator==(const DepositLot&, const DepositLot&) = default;
};

Decimal deposit_fee(Decimal amount, const FeeSchedule& schedule);
Decimal subfund_deposit_fee(Decimal amount, Fund fund, Channel channel, const FeeSchedule& schedule);
Decimal preference_change_fee(Decimal total_deposited, const FeeSchedule& schedule);
/// Fee for a deposit that also changes preferences: the smaller of the two.
Decimal combined_action_fee(Decimal deposit_amount, Decimal total_deposited, const FeeSchedule& schedule);

Decimal redemption_rate(long holding_days, const FeeSchedule& schedule);
Decimal redemption_penalty(long holding_days, Decimal amount, const FeeSchedule& schedule);

struct LotRedemption {
    Decimal penalty;
    std::vector<DepositLot> remaining;
};

/// Consumes `amount` from the lots oldest-first, charging each slice the
/// penalty for its own age at `as_of`. Any amount beyond the open lots
/// (gains) is penalty-free.
LotRedemption redeem_fifo(const std::vector<DepositLot>& lots, Decimal amount, Date as_of, const FeeSchedule& schedule);

}  // namespace parity
